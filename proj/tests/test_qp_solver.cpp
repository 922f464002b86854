#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "shapeguard/error.hpp"
#include "shapeguard/qp_solver.hpp"

using namespace shapeguard;

namespace {

QpProblem random_problem(std::mt19937_64& rng, int p, int m, bool singular) {
  std::normal_distribution<double> g(0.0, 1.0);
  const int rank = singular ? std::max(1, p - 2) : p + 2;
  Eigen::MatrixXd A(rank, p);
  for (int i = 0; i < rank; ++i)
    for (int j = 0; j < p; ++j) A(i, j) = g(rng);
  QpProblem q;
  q.hessian = A.transpose() * A;
  q.linear = Eigen::VectorXd::NullaryExpr(p, [&] { return g(rng); });
  // Rows around a known interior point keep the problem feasible, and box rows
  // keep it bounded when the Hessian is singular.
  const Eigen::VectorXd x0 = Eigen::VectorXd::NullaryExpr(p, [&] { return 0.3 * g(rng); });
  q.rows.resize(m + 2 * p, p);
  q.rhs.resize(m + 2 * p);
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < p; ++j) q.rows(i, j) = g(rng);
    q.rhs(i) = q.rows.row(i).dot(x0) - std::abs(g(rng));
  }
  for (int j = 0; j < p; ++j) {
    q.rows.row(m + 2 * j).setZero();
    q.rows(m + 2 * j, j) = 1.0;
    q.rhs(m + 2 * j) = -5.0;
    q.rows.row(m + 2 * j + 1).setZero();
    q.rows(m + 2 * j + 1, j) = -1.0;
    q.rhs(m + 2 * j + 1) = -5.0;
  }
  return q;
}

// Independent optimality certificate: feasibility, non-negative multipliers,
// stationarity H x + c = G_A' mu, complementary slackness.
void expect_kkt(const QpProblem& q, const QpResult& r, double tol) {
  const Eigen::VectorXd slack = q.rows * r.x - q.rhs;
  EXPECT_GE(slack.minCoeff(), -tol);
  Eigen::VectorXd grad = q.hessian * r.x + q.linear;
  for (std::size_t k = 0; k < r.active.size(); ++k) {
    EXPECT_GE(r.multipliers[k], -tol);
    EXPECT_NEAR(slack(r.active[k]), 0.0, tol);
    grad -= r.multipliers[k] * q.rows.row(r.active[k]).transpose();
  }
  EXPECT_LE(grad.lpNorm<Eigen::Infinity>(), tol * (1 + q.linear.lpNorm<Eigen::Infinity>()));
}

}  // namespace

TEST(Qp, UnconstrainedMatchesLinearSolve) {
  std::mt19937_64 rng(1);
  for (int trial = 0; trial < 20; ++trial) {
    QpProblem q = random_problem(rng, 5, 0, false);
    q.rows.resize(0, 5);
    q.rhs.resize(0);
    const QpResult r = solve_qp(q);
    const Eigen::VectorXd expected = q.hessian.ldlt().solve(-q.linear);
    EXPECT_LE((r.x - expected).lpNorm<Eigen::Infinity>(), 1e-9);
  }
}

TEST(Qp, DiagonalBoxProblemIsClipped) {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(-3.0, 3.0), pos(0.5, 4.0);
  for (int trial = 0; trial < 50; ++trial) {
    const int p = 4;
    QpProblem q;
    q.hessian = Eigen::MatrixXd::Zero(p, p);
    q.linear.resize(p);
    q.rows = Eigen::MatrixXd::Zero(2 * p, p);
    q.rhs.resize(2 * p);
    Eigen::VectorXd lo(p), hi(p), expected(p);
    for (int j = 0; j < p; ++j) {
      q.hessian(j, j) = pos(rng);
      q.linear(j) = u(rng);
      lo(j) = -1.0;
      hi(j) = 0.5;
      q.rows(2 * j, j) = 1.0;
      q.rhs(2 * j) = lo(j);
      q.rows(2 * j + 1, j) = -1.0;
      q.rhs(2 * j + 1) = -hi(j);
      expected(j) = std::clamp(-q.linear(j) / q.hessian(j, j), lo(j), hi(j));
    }
    const QpResult r = solve_qp(q);
    EXPECT_LE((r.x - expected).lpNorm<Eigen::Infinity>(), 1e-12);
  }
}

TEST(Qp, RandomProblemsSatisfyKkt) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 60; ++trial) {
    const bool singular = trial % 3 == 0;
    const QpProblem q = random_problem(rng, 6, 12, singular);
    const QpResult r = solve_qp(q);
    expect_kkt(q, r, 1e-7);
  }
}

TEST(Qp, ObjectiveTraceNeverIncreases) {
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 30; ++trial) {
    const QpProblem q = random_problem(rng, 8, 20, trial % 2 == 0);
    const QpResult r = solve_qp(q);
    for (std::size_t i = 1; i < r.objective_trace.size(); ++i) {
      EXPECT_LE(r.objective_trace[i], r.objective_trace[i - 1] + 1e-12 * (1 + std::abs(r.objective_trace[i - 1])));
    }
    EXPECT_NEAR(r.objective_trace.back(), qp_objective(q, r.x), 1e-9 * (1 + std::abs(qp_objective(q, r.x))));
  }
}

TEST(Qp, InfeasibleRowsAreNamed) {
  QpProblem q;
  q.hessian = Eigen::MatrixXd::Identity(1, 1);
  q.linear = Eigen::VectorXd::Zero(1);
  q.rows.resize(3, 1);
  q.rows << 1.0, 0.0, -1.0;
  q.rhs.resize(3);
  q.rhs << 1.0, -1.0, 0.0;  // x >= 1, 0 >= -1, x <= 0
  try {
    solve_qp(q);
    FAIL() << "expected InfeasibleError";
  } catch (const InfeasibleError& e) {
    EXPECT_EQ(e.first_row(), 0u);
    EXPECT_EQ(e.second_row(), 2u);
  }
}

TEST(Qp, IterationBudgetRaisesSolverError) {
  std::mt19937_64 rng(5);
  const QpProblem q = random_problem(rng, 6, 20, false);
  QpOptions o;
  o.max_iter = 1;
  EXPECT_THROW(solve_qp(q, o), SolverError);
}

TEST(Qp, InfeasibleStartRunsPhaseOne) {
  QpProblem q;
  q.hessian = Eigen::MatrixXd::Identity(2, 2);
  q.linear = Eigen::VectorXd::Zero(2);
  q.rows = Eigen::MatrixXd::Identity(2, 2);
  q.rhs = Eigen::VectorXd::Constant(2, 1.0);
  const QpResult r = solve_qp(q);
  EXPECT_TRUE(r.phase_one);
  EXPECT_NEAR(r.x(0), 1.0, 1e-12);
  EXPECT_NEAR(r.x(1), 1.0, 1e-12);
}
