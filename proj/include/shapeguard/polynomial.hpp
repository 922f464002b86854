#pragma once

#include <compare>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "shapeguard/interval.hpp"

namespace shapeguard {

/// Exponent vector of a monomial, one entry per model variable.
struct MultiIndex {
  std::vector<int> exponents;

  int total_degree() const noexcept;
  std::size_t size() const noexcept { return exponents.size(); }

  /// Unit index e_var scaled by `order`.
  static MultiIndex unit(std::size_t n_vars, std::size_t var, int order = 1);

  friend bool operator==(const MultiIndex&, const MultiIndex&) = default;
};

/// Graded-lex order: lower total degree first, then lexicographically larger
/// exponent vectors first. For (x, y) up to degree 2 this gives 1, x, y, x^2, xy, y^2.
bool graded_lex_less(const MultiIndex& a, const MultiIndex& b) noexcept;

/// All multi-indices of total degree <= degree in graded-lex order.
/// The count is C(n_vars + degree, degree).
std::vector<MultiIndex> monomial_basis(std::size_t n_vars, int degree);

/// Multivariate polynomial of bounded total degree over named variables.
/// Coefficients are stored densely in graded-lex basis order.
class PolyModel {
 public:
  PolyModel() = default;
  /// Zero polynomial.
  PolyModel(std::vector<std::string> variables, int degree);
  /// Throws ConfigError when `coefficients` does not match the basis size.
  PolyModel(std::vector<std::string> variables, int degree, std::vector<double> coefficients);

  const std::vector<std::string>& variables() const noexcept { return variables_; }
  int degree() const noexcept { return degree_; }
  const std::vector<MultiIndex>& basis() const noexcept { return basis_; }
  const std::vector<double>& coefficients() const noexcept { return coefficients_; }
  std::size_t n_terms() const noexcept { return basis_.size(); }

  double coefficient(const MultiIndex& index) const;
  /// Throws ConfigError if the index is not in the basis.
  void set_coefficient(const MultiIndex& index, double value);

  /// Position of `name` in variables(); throws ArityError if absent.
  std::size_t variable_index(const std::string& name) const;

  /// Values in model variable order. Throws ArityError on size mismatch.
  double eval(std::span<const double> x) const;
  /// Named point; throws ArityError when a model variable is missing.
  double eval(const std::map<std::string, double>& x) const;

  /// Exact partial derivative. `wrt` has one exponent per model variable.
  PolyModel derivative(const MultiIndex& wrt) const;

  friend bool operator==(const PolyModel&, const PolyModel&) = default;

 private:
  std::vector<std::string> variables_;
  int degree_ = 0;
  std::vector<MultiIndex> basis_;
  std::vector<double> coefficients_;
};

/// Natural interval enclosure of the polynomial over `region`, evaluating each
/// monomial with exact integer-power rules. Throws ArityError when the region
/// misses a model variable.
Interval poly_interval_bound(const PolyModel& model, const Box& region);

/// Tighter enclosures for repeated bounding of one polynomial over sub-boxes:
/// the natural enclosure intersected with the mean-value form
/// p(c) + sum_i dp/dx_i(X) (X_i - c_i).
class RangeBounder {
 public:
  explicit RangeBounder(PolyModel model);

  /// `lo`, `hi` are box bounds in model variable order.
  Interval bound(std::span<const double> lo, std::span<const double> hi) const;
  const PolyModel& model() const noexcept { return model_; }

 private:
  PolyModel model_;
  std::vector<PolyModel> gradient_;
};

/// Natural enclosure with bounds given in model variable order.
Interval poly_interval_bound(const PolyModel& model, std::span<const double> lo,
                             std::span<const double> hi);

/// Serializes as {"variables", "degree", "terms": [{"exponents", "coeff"}]} in
/// graded-lex order with coefficients printed to 17 significant digits.
std::string poly_to_json(const PolyModel& model);
/// Accepts sparse term lists; missing terms are zero.
PolyModel poly_from_json(const std::string& text);

/// Formats a double with 17 significant digits (round-trip exact).
std::string format_double(double value);

}  // namespace shapeguard
