#include "shapeguard/synth.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "shapeguard/error.hpp"

namespace shapeguard {

namespace {

// Independent stream for error injection so that a friction_<error> dataset
// shares clean data and noise with its friction_valid twin.
constexpr std::uint64_t kInjectionSalt = 0x9e3779b97f4a7c15ULL;

double uniform(std::mt19937_64& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

double clean_range(const FrictionCoefficients& c) {
  return (c.a1 - c.a2) + (c.a3 - c.a4);
}

struct FrictionSample {
  std::vector<double> p, v, t, clean, noise;
  std::size_t segment_rows = 0;
  std::size_t segments = 0;
};

FrictionSample sample_friction(const FrictionCoefficients& coef, std::uint64_t seed,
                               const SynthParams& params, bool inverted) {
  if (params.p_levels < 2 || params.v_levels < 1 || params.rows_per_segment < 2) {
    throw ConfigError("friction schedule needs p_levels >= 2, v_levels >= 1, rows_per_segment >= 2");
  }
  std::mt19937_64 rng(seed);
  // Coefficients consume the first draws of the same stream.
  for (int i = 0; i < 6; ++i) rng();
  std::normal_distribution<double> gauss(0.0, 1.0);

  FrictionSample s;
  s.segment_rows = static_cast<std::size_t>(params.rows_per_segment);
  s.segments = static_cast<std::size_t>(params.p_levels * params.v_levels);
  const double sigma = params.noise * clean_range(coef);
  for (int ip = 0; ip < params.p_levels; ++ip) {
    for (int iv = 0; iv < params.v_levels; ++iv) {
      const int seg = ip * params.v_levels + iv;
      const double base = static_cast<double>((seg + seg / params.v_levels) % 3) * 0.25;
      const double pu = static_cast<double>(ip) / (params.p_levels - 1);
      const double vu = params.v_levels == 1 ? 0.0 : static_cast<double>(iv) / (params.v_levels - 1);
      for (int k = 0; k < params.rows_per_segment; ++k) {
        const double tu = base + 0.5 * static_cast<double>(k) / (params.rows_per_segment - 1);
        const double p_term = -coef.a1 * pu + coef.a2 * pu * pu;
        const double mu = coef.a0 + (inverted ? -p_term : p_term) - coef.a3 * tu +
                          coef.a4 * tu * tu + coef.a5 * vu * (1.0 - vu);
        s.p.push_back(pu);
        s.v.push_back(vu);
        s.t.push_back(tu);
        s.clean.push_back(mu);
        s.noise.push_back(sigma * gauss(rng));
      }
    }
  }
  return s;
}

Dataset cubic_dataset(std::uint64_t seed, const SynthParams& params) {
  if (params.cubic_points < 2) throw ConfigError("cubic_points must be at least 2");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, params.cubic_sigma);
  std::vector<double> x(static_cast<std::size_t>(params.cubic_points));
  std::vector<double> y(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    x[i] = uniform(rng, params.cubic_x_lo, params.cubic_x_hi);
  }
  std::sort(x.begin(), x.end());
  for (std::size_t i = 0; i < x.size(); ++i) {
    y[i] = params.cubic_c3 * x[i] * x[i] * x[i] + params.cubic_c1 * x[i] + params.cubic_c0 +
           gauss(rng);
  }
  Dataset data("cubic_fig1_" + std::to_string(seed), "y");
  data.add_column("x", std::move(x));
  data.add_column("y", std::move(y));
  data.label = Label::valid;
  return data;
}

}  // namespace

SynthKind parse_synth_kind(const std::string& name) {
  if (name == "cubic_fig1") return SynthKind::cubic_fig1;
  if (name == "friction_valid") return SynthKind::friction_valid;
  if (name == "friction_outlier") return SynthKind::friction_outlier;
  if (name == "friction_stuck") return SynthKind::friction_stuck;
  if (name == "friction_drift") return SynthKind::friction_drift;
  if (name == "friction_inverted") return SynthKind::friction_inverted;
  throw ConfigError("unknown synthetic dataset kind '" + name + "'");
}

std::string to_string(SynthKind kind) {
  switch (kind) {
    case SynthKind::cubic_fig1: return "cubic_fig1";
    case SynthKind::friction_valid: return "friction_valid";
    case SynthKind::friction_outlier: return "friction_outlier";
    case SynthKind::friction_stuck: return "friction_stuck";
    case SynthKind::friction_drift: return "friction_drift";
    case SynthKind::friction_inverted: return "friction_inverted";
  }
  return "unknown";
}

FrictionCoefficients friction_coefficients(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  auto u01 = [&] { return static_cast<double>(rng() >> 11) * 0x1.0p-53; };
  FrictionCoefficients c{};
  c.a0 = 0.12 + 0.04 * u01();
  c.a1 = 0.02 + 0.02 * u01();
  c.a2 = 0.4 * c.a1 * u01();  // a1 >= 2 a2 keeps d/dp <= 0 on [0, 1]
  c.a3 = 0.01 + 0.02 * u01();
  c.a4 = 0.4 * c.a3 * u01();
  // |d mu/dv| <= |a5|. Kept at 0.4% of the clean range so the bound of 0.01
  // also holds for the unit-scaled target, whose range is close to the clean one.
  c.a5 = 0.004 * clean_range(c) * (2.0 * u01() - 1.0);
  return c;
}

PolyModel friction_surface(const FrictionCoefficients& c) {
  PolyModel m({"p", "v", "T"}, 2);
  m.set_coefficient({{0, 0, 0}}, c.a0);
  m.set_coefficient({{1, 0, 0}}, -c.a1);
  m.set_coefficient({{2, 0, 0}}, c.a2);
  m.set_coefficient({{0, 0, 1}}, -c.a3);
  m.set_coefficient({{0, 0, 2}}, c.a4);
  m.set_coefficient({{0, 1, 0}}, c.a5);
  m.set_coefficient({{0, 2, 0}}, -c.a5);
  return m;
}

Dataset synth_generate(SynthKind kind, std::uint64_t seed, const SynthParams& params) {
  if (kind == SynthKind::cubic_fig1) return cubic_dataset(seed, params);

  const FrictionCoefficients coef = friction_coefficients(seed);
  const bool inverted = kind == SynthKind::friction_inverted;
  const FrictionSample s = sample_friction(coef, seed, params, inverted);
  const std::size_t n = s.clean.size();
  std::vector<double> mu(n);
  for (std::size_t i = 0; i < n; ++i) mu[i] = s.clean[i] + s.noise[i];

  std::mt19937_64 inject(seed ^ kInjectionSalt);
  const double sigma = params.noise * clean_range(coef);
  std::optional<ErrorAnnotation> error;
  switch (kind) {
    case SynthKind::friction_outlier: {
      const auto seg = static_cast<std::size_t>(inject() % s.segments);
      const std::size_t start = seg * s.segment_rows;
      const auto n_spikes = std::max<std::size_t>(
          1, static_cast<std::size_t>(std::ceil(params.spike_fraction *
                                                static_cast<double>(s.segment_rows))));
      std::vector<std::size_t> rows(s.segment_rows);
      for (std::size_t i = 0; i < rows.size(); ++i) rows[i] = start + i;
      std::shuffle(rows.begin(), rows.end(), inject);
      for (std::size_t i = 0; i < n_spikes; ++i) {
        const double sign = (inject() & 1U) ? 1.0 : -1.0;
        mu[rows[i]] += sign * params.spike_sigma * sigma;
      }
      error = ErrorAnnotation{"outlier", start, start + s.segment_rows};
      break;
    }
    case SynthKind::friction_stuck: {
      const auto seg = 1 + static_cast<std::size_t>(inject() % (s.segments - 1));
      const std::size_t start = seg * s.segment_rows;
      const double frozen = mu[start - 1];
      for (std::size_t i = start; i < start + s.segment_rows; ++i) mu[i] = frozen;
      error = ErrorAnnotation{"stuck", start, start + s.segment_rows};
      break;
    }
    case SynthKind::friction_drift: {
      const std::size_t start = n / 4 + static_cast<std::size_t>(inject() % (n / 4 + 1));
      const double magnitude = uniform(inject, params.drift_min, params.drift_max) * clean_range(coef);
      for (std::size_t i = start; i < n; ++i) {
        mu[i] += magnitude * static_cast<double>(i - start) / static_cast<double>(n - 1 - start);
      }
      error = ErrorAnnotation{"drift", start, n};
      break;
    }
    case SynthKind::friction_inverted:
      error = ErrorAnnotation{"inverted", 0, n};
      break;
    default:
      break;
  }

  Dataset data(to_string(kind) + "_" + std::to_string(seed), "mu");
  auto to_physical = [](const std::vector<double>& unit, double lo, double hi) {
    std::vector<double> out(unit.size());
    for (std::size_t i = 0; i < unit.size(); ++i) out[i] = lo + (hi - lo) * unit[i];
    return out;
  };
  data.add_column("p", to_physical(s.p, params.p_min, params.p_max));
  data.add_column("v", to_physical(s.v, params.v_min, params.v_max));
  data.add_column("T", to_physical(s.t, params.t_min, params.t_max));
  data.add_column("mu", std::move(mu));
  data.label = kind == SynthKind::friction_valid ? Label::valid : Label::invalid;
  data.error = error;
  return data;
}

std::vector<Dataset> synth_corpus(std::uint64_t seed, const SynthParams& params,
                                  const CorpusOptions& options) {
  static constexpr SynthKind kErrors[] = {SynthKind::friction_outlier, SynthKind::friction_stuck,
                                          SynthKind::friction_drift, SynthKind::friction_inverted};
  std::vector<Dataset> corpus;
  std::uint64_t index = 0;
  for (int i = 0; i < options.n_valid; ++i, ++index) {
    Dataset d = synth_generate(SynthKind::friction_valid, seed ^ index, params);
    d.set_name("valid_" + std::to_string(i));
    corpus.push_back(std::move(d));
  }
  for (int i = 0; i < options.n_invalid; ++i, ++index) {
    const SynthKind kind = kErrors[i % 4];
    Dataset d = synth_generate(kind, seed ^ index, params);
    d.set_name("invalid_" + std::to_string(i) + "_" + d.error->kind);
    corpus.push_back(std::move(d));
  }
  return corpus;
}

}  // namespace shapeguard
