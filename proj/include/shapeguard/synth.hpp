#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "shapeguard/dataset.hpp"
#include "shapeguard/polynomial.hpp"

namespace shapeguard {

enum class SynthKind {
  cubic_fig1,
  friction_valid,
  friction_outlier,
  friction_stuck,
  friction_drift,
  friction_inverted,
};

/// Throws ConfigError for unknown names.
SynthKind parse_synth_kind(const std::string& name);
std::string to_string(SynthKind kind);

/// Generator parameters. Every coefficient lives here rather than in code.
struct SynthParams {
  // Cubic showcase: y = c3 x^3 + c1 x + c0 + N(0, sigma^2), x uniform on [x_lo, x_hi].
  // The base function is monotone; the noise produces a decreasing stretch in
  // an unconstrained cubic fit around the flat region near x = 0.
  double cubic_c3 = 1.0;
  double cubic_c1 = 0.0;
  double cubic_c0 = 0.0;
  double cubic_sigma = 1.0;
  double cubic_x_lo = -2.0;
  double cubic_x_hi = 2.0;
  int cubic_points = 40;

  // Friction surrogate on unit coordinates; p and v step through a level
  // schedule (p outer, ascending), temperature rises within each segment.
  int p_levels = 4;
  int v_levels = 3;
  int rows_per_segment = 25;
  /// Noise standard deviation as a fraction of the clean target range.
  double noise = 0.03;
  /// Outlier spikes: magnitude in noise standard deviations and fraction of one segment.
  double spike_sigma = 10.0;
  double spike_fraction = 0.05;
  /// Drift: final additive offset as a fraction of the clean range, drawn uniformly.
  double drift_min = 0.25;
  double drift_max = 0.6;

  // Physical column ranges written to the CSV (unit coordinates map linearly).
  double p_min = 0.5, p_max = 4.0;    // MPa
  double v_min = 2.0, v_max = 20.0;   // m/s
  double t_min = 40.0, t_max = 140.0; // deg C
};

/// Coefficients a0..a5 of mu = a0 - a1 p + a2 p^2 - a3 T + a4 T^2 + a5 v (1 - v).
struct FrictionCoefficients {
  double a0, a1, a2, a3, a4, a5;
};

/// Coefficients drawn for `seed`. They satisfy the expert friction constraints
/// on the unit box, including after unit scaling of the target.
FrictionCoefficients friction_coefficients(std::uint64_t seed);
/// The generating surface as a polynomial over (p, v, T) in unit coordinates.
PolyModel friction_surface(const FrictionCoefficients& c);

/// Labeled synthetic dataset. friction_* datasets with equal seeds share the
/// same clean data and noise and differ only inside `error` rows.
Dataset synth_generate(SynthKind kind, std::uint64_t seed, const SynthParams& params = {});

struct CorpusOptions {
  int n_valid = 18;
  int n_invalid = 35;
};

/// Valid datasets first, then invalid ones cycling outlier, stuck, drift,
/// inverted. Dataset i uses seed ^ i.
std::vector<Dataset> synth_corpus(std::uint64_t seed, const SynthParams& params = {},
                                  const CorpusOptions& options = {});

}  // namespace shapeguard
