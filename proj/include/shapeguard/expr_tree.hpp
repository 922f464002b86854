#pragma once

#include <cstdint>
#include <memory>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "shapeguard/constraint_spec.hpp"
#include "shapeguard/interval.hpp"

namespace shapeguard {

enum class Op : std::uint8_t { constant, variable, neg, add, sub, mul, div };

int arity(Op op) noexcept;

struct Node {
  Op op = Op::constant;
  double value = 0.0;  // constant
  int var = -1;        // variable index into the tree's schema
};

using Schema = std::shared_ptr<const std::vector<std::string>>;

/// Expression tree stored as a prefix-ordered node array over a variable schema.
class ExprTree {
 public:
  ExprTree() = default;
  ExprTree(Schema schema, std::vector<Node> nodes);

  static ExprTree constant(Schema schema, double value);
  static ExprTree variable(Schema schema, const std::string& name);
  static ExprTree unary(Op op, const ExprTree& child);
  static ExprTree binary(Op op, const ExprTree& left, const ExprTree& right);

  const Schema& schema() const noexcept { return schema_; }
  const std::vector<std::string>& variables() const { return *schema_; }
  const std::vector<Node>& nodes() const noexcept { return nodes_; }
  std::size_t size() const noexcept { return nodes_.size(); }
  int depth() const;

  /// One past the last node of the subtree rooted at `index`.
  std::size_t subtree_end(std::size_t index) const;
  /// Copy of the subtree rooted at `index`.
  ExprTree subtree(std::size_t index) const;
  /// Tree with the subtree at `index` replaced by `replacement`.
  ExprTree replace(std::size_t index, const ExprTree& replacement) const;

  /// Standard arithmetic; division by zero gives NaN or infinity, never throws.
  /// `x` is in schema order.
  double eval(std::span<const double> x) const;
  /// Evaluates the first out.size() rows; `columns` are in schema order.
  void eval_rows(const std::vector<std::span<const double>>& columns, std::vector<double>& out) const;

  std::string to_infix() const;
  std::string to_json() const;
  static ExprTree from_json(const std::string& text, Schema schema);

  friend bool operator==(const ExprTree& a, const ExprTree& b);

 private:
  Schema schema_;
  std::vector<Node> nodes_;
};

Schema make_schema(std::vector<std::string> variables);

/// Range, first and mixed second derivative enclosures of a tree over a box:
/// d/d(var_a), d/d(var_b), d2/(d var_a d var_b).
struct IntervalJet {
  Interval value;
  Interval da;
  Interval db;
  Interval dab;
};

/// Forward-mode interval differentiation. `lo`, `hi` are in schema order.
/// A division whose denominator enclosure contains zero makes every
/// component the unbounded interval.
IntervalJet interval_jet(const ExprTree& tree, std::span<const double> lo,
                         std::span<const double> hi, int var_a, int var_b);

/// Sound enclosure of d tree / d var over the region.
Interval tree_derivative_interval(const ExprTree& tree, const std::string& var, const Box& region);

/// a + b * tree, the form used for fitness after linear output scaling.
struct ScaledTree {
  ExprTree tree;
  double intercept = 0.0;
  double slope = 1.0;

  double eval(std::span<const double> x) const { return intercept + slope * tree.eval(x); }
};

struct ConstraintCheck {
  bool feasible = true;
  std::vector<Interval> enclosures;
};

/// Feasible iff every enclosure lies inside its bound. Value bounds use
/// a + b * range; derivative bounds scale by the slope b.
ConstraintCheck check_constraints(const ScaledTree& model,
                                  const std::vector<ShapeConstraint>& constraints);
ConstraintCheck check_constraints(const ExprTree& tree,
                                  const std::vector<ShapeConstraint>& constraints);

/// Random tree over the schema. `full` grows every branch to max_depth (depth
/// of a single node is 1); otherwise terminals may appear early. Constants
/// are uniform on [-2, 2].
ExprTree random_tree(std::mt19937_64& rng, const Schema& schema, int max_depth, bool full);

}  // namespace shapeguard
