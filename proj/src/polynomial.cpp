#include "shapeguard/polynomial.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>

#include <json.hpp>

#include "shapeguard/error.hpp"

namespace shapeguard {

namespace {

void append_with_sum(std::vector<int>& prefix, std::size_t n_vars, int remaining,
                     std::vector<MultiIndex>& out) {
  if (prefix.size() + 1 == n_vars) {
    prefix.push_back(remaining);
    out.push_back(MultiIndex{prefix});
    prefix.pop_back();
    return;
  }
  for (int e = remaining; e >= 0; --e) {
    prefix.push_back(e);
    append_with_sum(prefix, n_vars, remaining - e, out);
    prefix.pop_back();
  }
}

double ipow(double x, int n) {
  double result = 1.0;
  for (int i = 0; i < n; ++i) result *= x;
  return result;
}

// Falling factorial e (e-1) ... (e-k+1).
double falling(int e, int k) {
  double r = 1.0;
  for (int i = 0; i < k; ++i) r *= static_cast<double>(e - i);
  return r;
}

std::size_t basis_position(const std::vector<MultiIndex>& basis, const MultiIndex& index) {
  const auto it = std::lower_bound(basis.begin(), basis.end(), index, graded_lex_less);
  if (it == basis.end() || !(*it == index)) return basis.size();
  return static_cast<std::size_t>(it - basis.begin());
}

}  // namespace

int MultiIndex::total_degree() const noexcept {
  return std::accumulate(exponents.begin(), exponents.end(), 0);
}

MultiIndex MultiIndex::unit(std::size_t n_vars, std::size_t var, int order) {
  MultiIndex m{std::vector<int>(n_vars, 0)};
  m.exponents.at(var) = order;
  return m;
}

bool graded_lex_less(const MultiIndex& a, const MultiIndex& b) noexcept {
  const int da = a.total_degree();
  const int db = b.total_degree();
  if (da != db) return da < db;
  return std::lexicographical_compare(b.exponents.begin(), b.exponents.end(), a.exponents.begin(),
                                      a.exponents.end());
}

std::vector<MultiIndex> monomial_basis(std::size_t n_vars, int degree) {
  if (n_vars == 0) throw ConfigError("monomial basis needs at least one variable");
  if (degree < 0) throw ConfigError("polynomial degree must be non-negative");
  std::vector<MultiIndex> out;
  std::vector<int> prefix;
  for (int d = 0; d <= degree; ++d) append_with_sum(prefix, n_vars, d, out);
  return out;
}

PolyModel::PolyModel(std::vector<std::string> variables, int degree)
    : variables_(std::move(variables)), degree_(degree) {
  basis_ = monomial_basis(variables_.size(), degree_);
  coefficients_.assign(basis_.size(), 0.0);
  for (std::size_t i = 0; i < variables_.size(); ++i) {
    for (std::size_t j = i + 1; j < variables_.size(); ++j) {
      if (variables_[i] == variables_[j]) {
        throw ConfigError("duplicate model variable '" + variables_[i] + "'");
      }
    }
  }
}

PolyModel::PolyModel(std::vector<std::string> variables, int degree,
                     std::vector<double> coefficients)
    : PolyModel(std::move(variables), degree) {
  if (coefficients.size() != basis_.size()) {
    throw ConfigError("expected " + std::to_string(basis_.size()) + " coefficients, got " +
                      std::to_string(coefficients.size()));
  }
  coefficients_ = std::move(coefficients);
}

double PolyModel::coefficient(const MultiIndex& index) const {
  if (index.size() != variables_.size()) throw ArityError("multi-index arity mismatch");
  const std::size_t pos = basis_position(basis_, index);
  return pos == basis_.size() ? 0.0 : coefficients_[pos];
}

void PolyModel::set_coefficient(const MultiIndex& index, double value) {
  if (index.size() != variables_.size()) throw ArityError("multi-index arity mismatch");
  const std::size_t pos = basis_position(basis_, index);
  if (pos == basis_.size()) throw ConfigError("term exceeds model degree");
  coefficients_[pos] = value;
}

std::size_t PolyModel::variable_index(const std::string& name) const {
  const auto it = std::find(variables_.begin(), variables_.end(), name);
  if (it == variables_.end()) throw ArityError("model has no variable '" + name + "'");
  return static_cast<std::size_t>(it - variables_.begin());
}

double PolyModel::eval(std::span<const double> x) const {
  if (x.size() != variables_.size()) {
    throw ArityError("point has " + std::to_string(x.size()) + " values, model needs " +
                     std::to_string(variables_.size()));
  }
  // powers[v][e] = x_v^e
  std::vector<std::vector<double>> powers(x.size(), std::vector<double>(degree_ + 1, 1.0));
  for (std::size_t v = 0; v < x.size(); ++v) {
    for (int e = 1; e <= degree_; ++e) powers[v][e] = powers[v][e - 1] * x[v];
  }
  double sum = 0.0;
  for (std::size_t t = 0; t < basis_.size(); ++t) {
    if (coefficients_[t] == 0.0) continue;
    double term = coefficients_[t];
    for (std::size_t v = 0; v < x.size(); ++v) term *= powers[v][basis_[t].exponents[v]];
    sum += term;
  }
  return sum;
}

double PolyModel::eval(const std::map<std::string, double>& x) const {
  std::vector<double> values;
  values.reserve(variables_.size());
  for (const auto& name : variables_) {
    const auto it = x.find(name);
    if (it == x.end()) throw ArityError("point is missing variable '" + name + "'");
    values.push_back(it->second);
  }
  return eval(values);
}

PolyModel PolyModel::derivative(const MultiIndex& wrt) const {
  if (wrt.size() != variables_.size()) throw ArityError("derivative multi-index arity mismatch");
  const int order = wrt.total_degree();
  PolyModel result(variables_, std::max(0, degree_ - order));
  for (std::size_t t = 0; t < basis_.size(); ++t) {
    if (coefficients_[t] == 0.0) continue;
    MultiIndex reduced = basis_[t];
    double factor = coefficients_[t];
    bool vanishes = false;
    for (std::size_t v = 0; v < variables_.size(); ++v) {
      if (reduced.exponents[v] < wrt.exponents[v]) {
        vanishes = true;
        break;
      }
      factor *= falling(reduced.exponents[v], wrt.exponents[v]);
      reduced.exponents[v] -= wrt.exponents[v];
    }
    if (vanishes) continue;
    const std::size_t pos = basis_position(result.basis_, reduced);
    result.coefficients_[pos] += factor;
  }
  return result;
}

Interval poly_interval_bound(const PolyModel& model, std::span<const double> lo,
                             std::span<const double> hi) {
  const std::size_t n = model.variables().size();
  if (lo.size() != n || hi.size() != n) throw ArityError("box arity mismatch");
  const std::size_t stride = static_cast<std::size_t>(model.degree() + 1);
  thread_local std::vector<Interval> powers;
  powers.resize(n * stride);
  for (std::size_t v = 0; v < n; ++v) {
    const Interval range(lo[v], hi[v]);
    for (std::size_t e = 0; e < stride; ++e) powers[v * stride + e] = pow_int(range, static_cast<int>(e));
  }
  Interval sum(0.0);
  const auto& basis = model.basis();
  const auto& coeffs = model.coefficients();
  for (std::size_t t = 0; t < basis.size(); ++t) {
    if (coeffs[t] == 0.0) continue;
    Interval term(coeffs[t]);
    for (std::size_t v = 0; v < n; ++v) {
      const int e = basis[t].exponents[v];
      if (e > 0) term = term * powers[v * stride + static_cast<std::size_t>(e)];
    }
    sum = sum + term;
  }
  return sum;
}

Interval poly_interval_bound(const PolyModel& model, const Box& region) {
  std::vector<double> lo, hi;
  for (const auto& name : model.variables()) {
    const Interval& r = region.at(name);
    lo.push_back(r.lo());
    hi.push_back(r.hi());
  }
  return poly_interval_bound(model, lo, hi);
}

RangeBounder::RangeBounder(PolyModel model) : model_(std::move(model)) {
  const std::size_t n = model_.variables().size();
  gradient_.reserve(n);
  for (std::size_t v = 0; v < n; ++v) gradient_.push_back(model_.derivative(MultiIndex::unit(n, v)));
}

Interval RangeBounder::bound(std::span<const double> lo, std::span<const double> hi) const {
  const Interval natural = poly_interval_bound(model_, lo, hi);
  if (model_.degree() <= 1) return natural;
  const std::size_t n = lo.size();
  std::vector<double> center(n);
  for (std::size_t v = 0; v < n; ++v) center[v] = 0.5 * (lo[v] + hi[v]);
  Interval mean_value(model_.eval(center));
  for (std::size_t v = 0; v < n; ++v) {
    const Interval slope = poly_interval_bound(gradient_[v], lo, hi);
    mean_value = mean_value + slope * Interval(lo[v] - center[v], hi[v] - center[v]);
  }
  // The centre evaluation is a rounded scalar; widen by a few ulps of the
  // largest magnitude involved so the mean-value form stays an enclosure.
  const double scale = std::max(std::abs(mean_value.lo()), std::abs(mean_value.hi()));
  const double slack = 64.0 * std::numeric_limits<double>::epsilon() *
                       (scale + std::accumulate(model_.coefficients().begin(),
                                                model_.coefficients().end(), 0.0,
                                                [](double acc, double c) { return acc + std::abs(c); }));
  mean_value = Interval(mean_value.lo() - slack, mean_value.hi() + slack);
  return intersect(natural, mean_value);
}

std::string format_double(double value) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  std::string s(buf);
  // Keep the JSON number recognisably floating point.
  if (s.find_first_of(".eEn") == std::string::npos) s += ".0";
  return s;
}

std::string poly_to_json(const PolyModel& model) {
  std::string out = "{\"variables\": [";
  for (std::size_t i = 0; i < model.variables().size(); ++i) {
    if (i) out += ", ";
    out += nlohmann::json(model.variables()[i]).dump();
  }
  out += "], \"degree\": " + std::to_string(model.degree()) + ", \"terms\": [";
  for (std::size_t t = 0; t < model.n_terms(); ++t) {
    if (t) out += ", ";
    out += "{\"exponents\": [";
    const auto& e = model.basis()[t].exponents;
    for (std::size_t v = 0; v < e.size(); ++v) {
      if (v) out += ", ";
      out += std::to_string(e[v]);
    }
    out += "], \"coeff\": " + format_double(model.coefficients()[t]) + "}";
  }
  out += "]}";
  return out;
}

PolyModel poly_from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw SchemaError(std::string("model JSON: ") + e.what());
  }
  try {
    PolyModel model(j.at("variables").get<std::vector<std::string>>(), j.at("degree").get<int>());
    for (const auto& term : j.at("terms")) {
      model.set_coefficient(MultiIndex{term.at("exponents").get<std::vector<int>>()},
                            term.at("coeff").get<double>());
    }
    return model;
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError(std::string("model JSON: ") + e.what());
  }
}

}  // namespace shapeguard
