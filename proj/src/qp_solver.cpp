#include "shapeguard/qp_solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "shapeguard/error.hpp"

namespace shapeguard {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
// Consecutive zero-length steps before switching to Bland's rule.
constexpr int kBlandAfter = 100;

enum class StepKind { newton, ray };

struct Direction {
  Eigen::VectorXd d;
  StepKind kind = StepKind::newton;
  // Newton component, used if a ray turns out to be unbounded.
  Eigen::VectorXd newton;
};

std::vector<double> to_std(const Eigen::VectorXd& v) { return {v.data(), v.data() + v.size()}; }

double max_violation(const Eigen::MatrixXd& G, const Eigen::VectorXd& h, const Eigen::VectorXd& x) {
  if (G.rows() == 0) return 0.0;
  return std::max(0.0, (h - G * x).maxCoeff());
}

class ActiveSet {
 public:
  ActiveSet(const Eigen::MatrixXd& H, const Eigen::VectorXd& c, const Eigen::MatrixXd& G,
            const Eigen::VectorXd& h, const QpOptions& options)
      : H_(H), c_(c), G_(G), h_(h), options_(options), in_working_(G.rows(), 0) {
    row_norm_ = G_.rowwise().norm();
  }

  QpResult run(Eigen::VectorXd x) {
    QpResult result;
    const auto p = static_cast<int>(H_.rows());
    bool subspace_optimal = false;
    int zero_steps = 0;
    result.objective_trace.push_back(objective(x));
    for (int iter = 0; iter < options_.max_iter; ++iter) {
      result.iterations = iter + 1;
      const Eigen::VectorXd g = H_ * x + c_;
      factor(p);
      Direction dir;
      if (!subspace_optimal) {
        dir = direction(g, x);
        if (dir.d.size() == 0) subspace_optimal = true;
      }
      if (subspace_optimal) {
        if (working_.empty()) return finish(std::move(result), x, {});
        const Eigen::VectorXd mu = multipliers(g);
        int leave = -1;
        const double tol = 1e-10 * std::max(1.0, g.lpNorm<Eigen::Infinity>());
        for (int j = 0; j < mu.size(); ++j) {
          if (mu(j) >= -tol) continue;
          if (zero_steps > kBlandAfter) {
            if (leave < 0 || working_[j] < working_[leave]) leave = j;
          } else if (leave < 0 || mu(j) < mu(leave)) {
            leave = j;
          }
        }
        if (leave < 0) return finish(std::move(result), x, mu);
        in_working_[working_[leave]] = 0;
        working_.erase(working_.begin() + leave);
        subspace_optimal = false;
        continue;
      }

      double step = dir.kind == StepKind::newton ? 1.0 : kInf;
      int blocking = -1;
      ratio_test(x, dir.d, step, blocking);
      if (!std::isfinite(step)) {
        // Unbounded ray: fall back to the Newton component on the subspace.
        if (dir.newton.size() == 0) {
          throw SolverError("objective unbounded below on the feasible set", to_std(x), kInf);
        }
        dir.d = dir.newton;
        dir.kind = StepKind::newton;
        step = 1.0;
        blocking = -1;
        ratio_test(x, dir.d, step, blocking);
      }
      x += step * dir.d;
      const double f = objective(x);
      // Steps that leave the objective unchanged to rounding level count as
      // degenerate, so creeping cycles also end up under Bland's rule.
      const double f_prev = result.objective_trace.back();
      zero_steps = f_prev - f > 1e-13 * (1.0 + std::abs(f_prev)) ? 0 : zero_steps + 1;
      result.objective_trace.push_back(f);
      if (blocking >= 0) {
        working_.push_back(blocking);
        in_working_[blocking] = 1;
        subspace_optimal = false;
      } else {
        subspace_optimal = dir.kind == StepKind::newton;
      }
    }
    throw SolverError("active-set solver did not converge within " +
                          std::to_string(options_.max_iter) + " iterations",
                      to_std(x), max_violation(G_, h_, x));
  }

 private:
  double objective(const Eigen::VectorXd& x) const { return 0.5 * x.dot(H_ * x) + c_.dot(x); }

  void factor(int p) {
    const auto k = static_cast<int>(working_.size());
    if (k == 0) {
      basis_ = Eigen::MatrixXd::Identity(p, p);
      null_ = basis_;
      rfactor_.resize(0, 0);
      return;
    }
    Eigen::MatrixXd at(p, k);
    for (int j = 0; j < k; ++j) at.col(j) = G_.row(working_[j]).transpose();
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(at);
    basis_ = qr.householderQ() * Eigen::MatrixXd::Identity(p, p);
    null_ = basis_.rightCols(p - k);
    rfactor_ = qr.matrixQR().topLeftCorner(k, k).triangularView<Eigen::Upper>();
  }

  Eigen::VectorXd multipliers(const Eigen::VectorXd& g) const {
    const auto k = static_cast<int>(working_.size());
    const Eigen::VectorXd rhs = basis_.leftCols(k).transpose() * g;
    return rfactor_.triangularView<Eigen::Upper>().solve(rhs);
  }

  // Empty result means no descent direction on the current subspace.
  Direction direction(const Eigen::VectorXd& g, const Eigen::VectorXd& x) const {
    Direction dir;
    const auto free_dims = null_.cols();
    if (free_dims == 0) return dir;
    const Eigen::MatrixXd hr = null_.transpose() * H_ * null_;
    const Eigen::VectorXd gr = null_.transpose() * g;
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(hr);
    const Eigen::VectorXd& ev = eig.eigenvalues();
    const Eigen::MatrixXd& vec = eig.eigenvectors();
    const Eigen::VectorXd coords = vec.transpose() * gr;
    const double ev_tol = 1e-12 * std::max(ev.cwiseAbs().maxCoeff(), 1e-300);
    const double g_tol = 1e-12 * (1.0 + g.lpNorm<Eigen::Infinity>());

    Eigen::VectorXd newton_coords = Eigen::VectorXd::Zero(free_dims);
    Eigen::VectorXd ray_coords = Eigen::VectorXd::Zero(free_dims);
    bool has_ray = false;
    for (Eigen::Index i = 0; i < free_dims; ++i) {
      if (ev(i) > ev_tol) {
        newton_coords(i) = -coords(i) / ev(i);
      } else if (std::abs(coords(i)) > g_tol) {
        ray_coords(i) = -coords(i);
        has_ray = true;
      }
    }
    const Eigen::VectorXd newton = null_ * (vec * newton_coords);
    const double scale = 1e-15 * (1.0 + x.lpNorm<Eigen::Infinity>());
    if (has_ray) {
      dir.d = null_ * (vec * ray_coords);
      dir.kind = StepKind::ray;
      if (newton.lpNorm<Eigen::Infinity>() > scale) dir.newton = newton;
      return dir;
    }
    // Predicted decrease below rounding level: treat as stationary.
    const double decrease = -gr.dot(vec * newton_coords);
    if (newton.lpNorm<Eigen::Infinity>() <= scale || !(decrease > 0.0)) return dir;
    dir.d = newton;
    return dir;
  }

  void ratio_test(const Eigen::VectorXd& x, const Eigen::VectorXd& d, double& step,
                  int& blocking) const {
    if (G_.rows() == 0) return;
    const Eigen::VectorXd gd = G_ * d;
    const Eigen::VectorXd slack = G_ * x - h_;
    const double dnorm = d.norm();
    for (Eigen::Index i = 0; i < G_.rows(); ++i) {
      if (in_working_[i]) continue;
      if (!(gd(i) < -1e-13 * row_norm_(i) * dnorm)) continue;
      const double candidate = std::max(0.0, slack(i)) / -gd(i);
      if (candidate < step) {
        step = candidate;
        blocking = static_cast<int>(i);
      }
    }
  }

  QpResult finish(QpResult result, const Eigen::VectorXd& x, const Eigen::VectorXd& mu) const {
    result.x = x;
    result.active = working_;
    result.multipliers = to_std(mu);
    result.max_violation = max_violation(G_, h_, x);
    return result;
  }

  const Eigen::MatrixXd& H_;
  const Eigen::VectorXd& c_;
  const Eigen::MatrixXd& G_;
  const Eigen::VectorXd& h_;
  QpOptions options_;
  Eigen::VectorXd row_norm_;
  std::vector<int> working_;
  std::vector<char> in_working_;
  Eigen::MatrixXd basis_;
  Eigen::MatrixXd null_;
  Eigen::MatrixXd rfactor_;
};

}  // namespace

double qp_objective(const QpProblem& problem, const Eigen::VectorXd& x) {
  return 0.5 * x.dot(problem.hessian * x) + problem.linear.dot(x);
}

QpResult solve_qp(const QpProblem& problem, const QpOptions& options,
                  const std::optional<Eigen::VectorXd>& start) {
  const Eigen::Index p = problem.hessian.rows();
  if (problem.hessian.cols() != p || problem.linear.size() != p ||
      (problem.rows.rows() > 0 && problem.rows.cols() != p) ||
      problem.rows.rows() != problem.rhs.size()) {
    throw SolverError("QP dimensions are inconsistent", {}, kInf);
  }
  Eigen::VectorXd x = start.value_or(Eigen::VectorXd::Zero(p));
  const double violation = max_violation(problem.rows, problem.rhs, x);
  bool phase_one = false;
  if (violation > options.feasibility_tol) {
    // Phase 1: min s  s.t.  G x + s >= h,  s >= 0.
    const Eigen::Index m = problem.rows.rows();
    Eigen::MatrixXd g1 = Eigen::MatrixXd::Zero(m + 1, p + 1);
    g1.topLeftCorner(m, p) = problem.rows;
    g1.col(p).setOnes();
    Eigen::VectorXd h1 = Eigen::VectorXd::Zero(m + 1);
    h1.head(m) = problem.rhs;
    const Eigen::MatrixXd hess1 = Eigen::MatrixXd::Zero(p + 1, p + 1);
    Eigen::VectorXd c1 = Eigen::VectorXd::Zero(p + 1);
    c1(p) = 1.0;
    Eigen::VectorXd x1(p + 1);
    x1 << x, violation;
    QpResult r1 = ActiveSet(hess1, c1, g1, h1, options).run(x1);
    if (r1.x(p) > options.feasibility_tol) {
      std::vector<int> certificate;
      for (std::size_t j = 0; j < r1.active.size(); ++j) {
        if (r1.active[j] < m && r1.multipliers[j] > 0.0) certificate.push_back(r1.active[j]);
      }
      std::sort(certificate.begin(), certificate.end());
      const auto first = static_cast<std::size_t>(certificate.empty() ? 0 : certificate[0]);
      const auto second =
          static_cast<std::size_t>(certificate.size() > 1 ? certificate[1] : first);
      throw InfeasibleError("constraint rows " + std::to_string(first) + " and " +
                                std::to_string(second) + " cannot hold together (residual " +
                                std::to_string(r1.x(p)) + ")",
                            first, second);
    }
    x = r1.x.head(p);
    phase_one = true;
  }
  QpResult result =
      ActiveSet(problem.hessian, problem.linear, problem.rows, problem.rhs, options).run(x);
  result.phase_one = phase_one;
  return result;
}

}  // namespace shapeguard
