#pragma once

#include <optional>
#include <vector>

#include <Eigen/Dense>

namespace shapeguard {

/// minimize 0.5 x'Hx + c'x  subject to  G x >= h (row-wise).
///
/// H must be symmetric positive semidefinite. Zero-curvature directions are
/// allowed as long as the objective is bounded below on the feasible set.
struct QpProblem {
  Eigen::MatrixXd hessian;
  Eigen::VectorXd linear;
  Eigen::MatrixXd rows;
  Eigen::VectorXd rhs;
};

struct QpOptions {
  double feasibility_tol = 1e-8;
  int max_iter = 50000;
};

struct QpResult {
  Eigen::VectorXd x;
  int iterations = 0;
  /// Objective value after every primal step; non-increasing.
  std::vector<double> objective_trace;
  /// Working set at the solution (row indices).
  std::vector<int> active;
  /// Multipliers of the active rows, same order as `active`.
  std::vector<double> multipliers;
  double max_violation = 0.0;
  bool phase_one = false;
};

/// Primal active-set method with a null-space step on the working set.
///
/// Starts at `start` (zero when omitted). An infeasible start triggers a
/// phase-1 problem that minimises a single shared slack. Throws
/// InfeasibleError naming two rows of the infeasibility certificate, or
/// SolverError when max_iter is exhausted.
QpResult solve_qp(const QpProblem& problem, const QpOptions& options = {},
                  const std::optional<Eigen::VectorXd>& start = std::nullopt);

double qp_objective(const QpProblem& problem, const Eigen::VectorXd& x);

}  // namespace shapeguard
