#pragma once

#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "shapeguard/constraint_spec.hpp"
#include "shapeguard/dataset.hpp"
#include "shapeguard/polynomial.hpp"

namespace shapeguard {

/// Hyper-parameters and tolerances of (shape-constrained) polynomial regression.
///
/// Objective: (1/n)|X theta - y|^2 + lambda (alpha |theta'|_1 + (1 - alpha)/2 |theta'|_2^2)
/// where theta' excludes the intercept.
struct ScprConfig {
  int degree = 3;
  double lambda = 0.0;
  double alpha = 0.0;
  int grid_points_per_dim = 8;
  double solver_tol = 1e-8;
  int max_iter = 50000;
  /// Dense certification grid per dimension, capped at cert_max_points in total.
  int cert_grid = 64;
  double cert_tol = 1e-9;
  std::size_t cert_max_points = 1'000'000;
  /// Sub-boxes examined by interval bisection before a constraint is UNDECIDED.
  int cert_max_boxes = 2048;
  /// Re-fit when certification finds a violation: grid density doubles once,
  /// then up to refine_rounds rounds add rows at the worst sampled points.
  bool refine = true;
  int refine_rounds = 12;

  /// Throws ConfigError on out-of-range values.
  void validate() const;
};

enum class Relation { greater_equal, less_equal };

struct ConstraintRow {
  std::vector<double> coefficients;
  Relation relation = Relation::greater_equal;
  double rhs = 0.0;
  std::size_t constraint = 0;
  std::vector<double> point;
};

/// Linear inequalities over the graded-lex monomial basis.
struct LinearConstraintSystem {
  std::size_t n_terms = 0;
  std::vector<ConstraintRow> rows;

  void append(const LinearConstraintSystem& other);
};

/// Row budget of a compiled system.
inline constexpr std::size_t kMaxConstraintRows = 1'000'000;

/// Row i, column alpha = x_i^alpha over the monomial basis (constant column first).
/// Throws SchemaError on a missing column and DataError on a non-finite cell.
std::pair<Eigen::MatrixXd, Eigen::VectorXd> build_design_matrix(
    const Dataset& data, const std::vector<std::string>& variables, const std::string& target,
    int degree);

/// One row per constraint, grid point and finite bound side, on a tensor grid
/// with `grid_points_per_dim` points per dimension including the region corners.
/// Throws BudgetError when the grid exceeds kMaxConstraintRows rows.
LinearConstraintSystem compile_constraints(const std::vector<ShapeConstraint>& constraints,
                                           const std::vector<std::string>& variables, int degree,
                                           int grid_points_per_dim);

/// Rows enforcing one constraint at explicit points.
LinearConstraintSystem compile_at_points(const ShapeConstraint& constraint, std::size_t index,
                                         const std::vector<std::string>& variables, int degree,
                                         const std::vector<std::vector<double>>& points);

enum class CertStatus { certified, violated, undecided };
std::string to_string(CertStatus status);

struct ConstraintCertificate {
  std::string constraint;
  CertStatus status = CertStatus::undecided;
  /// Natural interval enclosure over the whole region.
  Interval enclosure;
  /// Largest sampled breach of the bound (0 when none).
  double worst_violation = 0.0;
  std::vector<double> worst_point;
  int boxes_examined = 0;
};

struct CertificationReport {
  std::vector<std::string> variables;
  std::vector<ConstraintCertificate> constraints;

  bool all_certified() const;
  bool any_violated() const;
};

struct CertifyOptions {
  int grid = 64;
  std::size_t max_points = 1'000'000;
  double tol = 1e-9;
  int max_boxes = 2048;
};

/// Per constraint: CERTIFIED when interval bounds (the natural enclosure,
/// refined by bisection with mean-value bounds) lie inside the bound; VIOLATED
/// when a sampled point breaches the bound by more than `tol`; else UNDECIDED.
CertificationReport certify(const PolyModel& model, const std::vector<ShapeConstraint>& constraints,
                            const CertifyOptions& options = {});

struct FitReport {
  double train_rmse = 0.0;
  double objective_value = 0.0;
  int iterations = 0;
  double max_sampled_violation = 0.0;
  double wall_time_seconds = 0.0;
  std::size_t constraint_rows = 0;
  int grid_points_per_dim = 0;
  int refinement_rounds = 0;
  bool phase_one = false;
  /// Solver objective after every iteration of the final solve.
  std::vector<double> objective_trace;
  /// Present for constrained fits.
  std::optional<CertificationReport> certification;
};

struct ScprFit {
  PolyModel model;
  FitReport report;
};

/// Plain (elastic-net regularised) polynomial regression on `variables`.
/// Throws SolverError on non-convergence.
ScprFit fit_unconstrained(const Dataset& data, const std::vector<std::string>& variables,
                          const ScprConfig& config);
/// Uses every non-target column as a variable.
ScprFit fit_unconstrained(const Dataset& data, const ScprConfig& config);

/// Same objective subject to the compiled constraint rows. Deterministic.
/// Throws InfeasibleError or SolverError.
ScprFit fit_constrained(const Dataset& data, const std::vector<std::string>& variables,
                        const ScprConfig& config, const std::vector<ShapeConstraint>& constraints);
ScprFit fit_constrained(const Dataset& data, const ScprConfig& config,
                        const std::vector<ShapeConstraint>& constraints);

/// Model predictions for every row of `data`.
std::vector<double> predict(const PolyModel& model, const Dataset& data);

}  // namespace shapeguard
