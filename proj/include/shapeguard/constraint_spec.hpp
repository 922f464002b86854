#pragma once

#include <string>
#include <vector>

#include "shapeguard/interval.hpp"
#include "shapeguard/polynomial.hpp"

namespace shapeguard {

/// Bound on f, df/dx_i or d2f/dx_i2 over a box.
///
/// `wrt` lists the differentiation variables: empty for the value itself,
/// {"p"} for df/dp, {"p", "p"} for d2f/dp2.
struct ShapeConstraint {
  std::vector<std::string> wrt;
  Interval bound;
  Box region;

  int order() const noexcept { return static_cast<int>(wrt.size()); }
  /// Multi-index of the derivative over `variables`; ArityError if a wrt
  /// variable is not among them.
  MultiIndex derivative_index(const std::vector<std::string>& variables) const;
  /// Region bounds in `variables` order. Variables the region does not
  /// mention span the unit interval.
  std::pair<std::vector<double>, std::vector<double>> region_bounds(
      const std::vector<std::string>& variables) const;
  /// DSL statement for this constraint, without region suffixes.
  std::string describe() const;

  friend bool operator==(const ShapeConstraint&, const ShapeConstraint&) = default;
};

struct ConstraintSpec {
  std::string target;
  Box box;
  std::vector<ShapeConstraint> constraints;

  friend bool operator==(const ConstraintSpec&, const ConstraintSpec&) = default;
};

/// Parses the line-oriented constraint language:
///
///   target <name>
///   box <var> in [<lo>, <hi>]
///   value in [<lo>, <hi>] | value >= <c> | value <= <c>
///   d1 <var> in [<lo>, <hi>] | d1 <var> >= <c> | d1 <var> <= <c>
///   d2 <var> >= <c> | d2 <var> <= <c>
///
/// Constraint lines take optional `on <var> in [<lo>, <hi>]` suffixes that
/// narrow the region; otherwise the region is the full declared box.
/// '#' starts a comment. Throws ParseError with the offending line number.
ConstraintSpec parse_constraints(const std::string& text);
ConstraintSpec load_constraints(const std::string& path);
std::string serialize_constraints(const ConstraintSpec& spec);

}  // namespace shapeguard
