#include "shapeguard/scpr.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <queue>

#include "shapeguard/error.hpp"
#include "shapeguard/qp_solver.hpp"

namespace shapeguard {

namespace {

std::vector<double> linspace(double lo, double hi, int n) {
  if (lo == hi || n <= 1) return {lo};
  std::vector<double> out(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) out[i] = lo + (hi - lo) * static_cast<double>(i) / (n - 1);
  out.back() = hi;
  return out;
}

double falling(int e, int k) {
  double r = 1.0;
  for (int i = 0; i < k; ++i) r *= static_cast<double>(e - i);
  return r;
}

double violation_of(const Interval& bound, double value) {
  return std::max({0.0, bound.lo() - value, value - bound.hi()});
}

// Derivative of every basis monomial at one point: d^wrt x^alpha.
std::vector<double> derivative_row(const std::vector<MultiIndex>& basis, const MultiIndex& wrt,
                                   const std::vector<double>& point) {
  std::vector<double> row(basis.size(), 0.0);
  for (std::size_t t = 0; t < basis.size(); ++t) {
    double value = 1.0;
    for (std::size_t v = 0; v < point.size(); ++v) {
      const int e = basis[t].exponents[v];
      const int k = wrt.exponents[v];
      if (e < k) {
        value = 0.0;
        break;
      }
      value *= falling(e, k) * std::pow(point[v], e - k);
    }
    row[t] = value;
  }
  return row;
}

// Tensor grid evaluation of one polynomial, tracking the worst bound breach.
struct GridScan {
  double worst = 0.0;
  std::vector<double> worst_point;
  /// (violation, point) of every grid point breaching by more than collect_tol.
  std::vector<std::pair<double, std::vector<double>>> breaches;
};

GridScan scan_grid(const PolyModel& q, const Interval& bound,
                   const std::vector<std::vector<double>>& axes,
                   double collect_tol = std::numeric_limits<double>::infinity()) {
  const std::size_t n = axes.size();
  const int deg = q.degree();
  // pw[v][i * (deg+1) + e] = axes[v][i]^e
  std::vector<std::vector<double>> pw(n);
  for (std::size_t v = 0; v < n; ++v) {
    pw[v].resize(axes[v].size() * static_cast<std::size_t>(deg + 1));
    for (std::size_t i = 0; i < axes[v].size(); ++i) {
      double acc = 1.0;
      for (int e = 0; e <= deg; ++e) {
        pw[v][i * (deg + 1) + e] = acc;
        acc *= axes[v][i];
      }
    }
  }
  std::vector<std::size_t> terms;
  for (std::size_t t = 0; t < q.n_terms(); ++t) {
    if (q.coefficients()[t] != 0.0) terms.push_back(t);
  }
  GridScan scan;
  scan.worst_point.assign(n, 0.0);
  if (n == 0) return scan;
  // Contract every axis but the last per outer index, leaving a univariate
  // polynomial in the last variable that is then swept along its axis.
  const std::size_t last = n - 1;
  const std::size_t stride = static_cast<std::size_t>(deg + 1);
  std::vector<double> inner(stride);
  std::vector<std::size_t> idx(n, 0);
  bool first = true;
  while (true) {
    std::fill(inner.begin(), inner.end(), 0.0);
    for (std::size_t t : terms) {
      double term = q.coefficients()[t];
      const auto& e = q.basis()[t].exponents;
      for (std::size_t v = 0; v < last; ++v) term *= pw[v][idx[v] * stride + e[v]];
      inner[e[last]] += term;
    }
    for (std::size_t k = 0; k < axes[last].size(); ++k) {
      const double* p = &pw[last][k * stride];
      double value = 0.0;
      for (std::size_t e = 0; e < stride; ++e) value += inner[e] * p[e];
      const double viol = violation_of(bound, value);
      if (viol > collect_tol) {
        std::vector<double> point(n);
        for (std::size_t v = 0; v < last; ++v) point[v] = axes[v][idx[v]];
        point[last] = axes[last][k];
        scan.breaches.emplace_back(viol, std::move(point));
      }
      if (first || viol > scan.worst) {
        scan.worst = viol;
        for (std::size_t v = 0; v < last; ++v) scan.worst_point[v] = axes[v][idx[v]];
        scan.worst_point[last] = axes[last][k];
        first = false;
      }
    }
    std::size_t v = 0;
    while (v < last && ++idx[v] == axes[v].size()) idx[v++] = 0;
    if (v == last) break;
  }
  return scan;
}

constexpr std::size_t kExchangePoints = 16;

// Coordinate pattern search for a larger breach near `start`.
std::vector<double> refine_worst_point(const PolyModel& q, const Interval& bound,
                                       std::vector<double> point, const std::vector<double>& lo,
                                       const std::vector<double>& hi, double initial_step) {
  double best = violation_of(bound, q.eval(point));
  double step = initial_step;
  double width = 0.0;
  for (std::size_t v = 0; v < lo.size(); ++v) width = std::max(width, hi[v] - lo[v]);
  while (step > 1e-13 * std::max(width, 1.0)) {
    bool improved = false;
    for (std::size_t v = 0; v < point.size(); ++v) {
      for (double sign : {-1.0, 1.0}) {
        std::vector<double> trial = point;
        trial[v] = std::clamp(trial[v] + sign * step, lo[v], hi[v]);
        const double viol = violation_of(bound, q.eval(trial));
        if (viol > best) {
          best = viol;
          point = std::move(trial);
          improved = true;
        }
      }
    }
    if (!improved) step *= 0.5;
  }
  return point;
}

struct BoxEntry {
  double excess;
  std::vector<double> lo, hi;
  bool operator<(const BoxEntry& other) const { return excess < other.excess; }
};

double excess_of(const Interval& enclosure, const Interval& bound) {
  return std::max({0.0, bound.lo() - enclosure.lo(), enclosure.hi() - bound.hi()});
}

int dense_points_per_dim(std::size_t n, const CertifyOptions& options) {
  int per_dim = options.grid;
  while (per_dim > 2 &&
         std::pow(static_cast<double>(per_dim), static_cast<double>(n)) >
             static_cast<double>(options.max_points)) {
    --per_dim;
  }
  return per_dim;
}

std::vector<std::vector<double>> dense_axes(const std::vector<double>& lo,
                                            const std::vector<double>& hi,
                                            const CertifyOptions& options) {
  const int per_dim = dense_points_per_dim(lo.size(), options);
  std::vector<std::vector<double>> axes(lo.size());
  for (std::size_t v = 0; v < lo.size(); ++v) axes[v] = linspace(lo[v], hi[v], per_dim);
  return axes;
}

ConstraintCertificate certify_one(const PolyModel& model, const ShapeConstraint& constraint,
                                  const CertifyOptions& options) {
  ConstraintCertificate cert;
  cert.constraint = constraint.describe();
  const auto& vars = model.variables();
  const PolyModel q = model.derivative(constraint.derivative_index(vars));
  const auto [lo, hi] = constraint.region_bounds(vars);
  cert.enclosure = poly_interval_bound(q, lo, hi);
  cert.boxes_examined = 1;
  cert.worst_point = lo;
  if (cert.enclosure.subset_of(constraint.bound)) {
    cert.status = CertStatus::certified;
    return cert;
  }

  // Dense sampling.
  const std::size_t n = vars.size();
  const GridScan scan = scan_grid(q, constraint.bound, dense_axes(lo, hi, options));
  cert.worst_violation = scan.worst;
  cert.worst_point = scan.worst_point;
  if (scan.worst > options.tol) {
    cert.status = CertStatus::violated;
    return cert;
  }

  // Bisection with mean-value enclosures, most offending box first.
  const RangeBounder bounder(q);
  std::priority_queue<BoxEntry> queue;
  queue.push({excess_of(cert.enclosure, constraint.bound), lo, hi});
  std::vector<double> center(n);
  while (!queue.empty()) {
    if (cert.boxes_examined >= options.max_boxes) {
      cert.status = CertStatus::undecided;
      return cert;
    }
    BoxEntry box = queue.top();
    queue.pop();
    std::size_t split = 0;
    for (std::size_t v = 1; v < n; ++v) {
      if (box.hi[v] - box.lo[v] > box.hi[split] - box.lo[split]) split = v;
    }
    const double mid = 0.5 * (box.lo[split] + box.hi[split]);
    for (int side = 0; side < 2; ++side) {
      BoxEntry child = box;
      (side == 0 ? child.hi : child.lo)[split] = mid;
      ++cert.boxes_examined;
      const Interval e = bounder.bound(child.lo, child.hi);
      if (e.subset_of(constraint.bound)) continue;
      for (std::size_t v = 0; v < n; ++v) center[v] = 0.5 * (child.lo[v] + child.hi[v]);
      const double viol = violation_of(constraint.bound, q.eval(center));
      if (viol > cert.worst_violation) {
        cert.worst_violation = viol;
        cert.worst_point = center;
      }
      if (viol > options.tol) {
        cert.status = CertStatus::violated;
        return cert;
      }
      child.excess = excess_of(e, constraint.bound);
      queue.push(std::move(child));
    }
  }
  cert.status = CertStatus::certified;
  return cert;
}

struct Solved {
  PolyModel model;
  QpResult qp;
};

// Assembles and solves the QP for the given rows.
class ElasticNetQp {
 public:
  ElasticNetQp(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, const ScprConfig& config,
               const std::vector<std::string>& variables)
      : config_(config), variables_(variables), p_(X.cols()) {
    const double n = static_cast<double>(X.rows());
    Eigen::MatrixXd h = (2.0 / n) * (X.transpose() * X);
    for (Eigen::Index j = 1; j < p_; ++j) h(j, j) += config.lambda * (1.0 - config.alpha);
    const Eigen::VectorXd c = -(2.0 / n) * (X.transpose() * y);
    constant_ = y.squaredNorm() / n;
    split_ = config.lambda * config.alpha > 0.0 && p_ > 1;
    if (!split_) {
      transform_ = Eigen::MatrixXd::Identity(p_, p_);
      problem_.hessian = h;
      problem_.linear = c;
    } else {
      // theta = T z with z = (theta_0, u, w), theta' = u - w, u, w >= 0.
      const Eigen::Index q = 2 * p_ - 1;
      transform_ = Eigen::MatrixXd::Zero(p_, q);
      transform_(0, 0) = 1.0;
      for (Eigen::Index j = 1; j < p_; ++j) {
        transform_(j, j) = 1.0;
        transform_(j, j + p_ - 1) = -1.0;
      }
      problem_.hessian = transform_.transpose() * h * transform_;
      problem_.linear = transform_.transpose() * c;
      problem_.linear.tail(q - 1).array() += config.lambda * config.alpha;
    }
  }

  Solved solve(const LinearConstraintSystem& system,
               const std::optional<Eigen::VectorXd>& start = std::nullopt) {
    const Eigen::Index q = transform_.cols();
    const auto m = static_cast<Eigen::Index>(system.rows.size());
    const Eigen::Index bounds = split_ ? q - 1 : 0;
    problem_.rows.resize(m + bounds, q);
    problem_.rhs.resize(m + bounds);
    for (Eigen::Index i = 0; i < m; ++i) {
      const ConstraintRow& row = system.rows[static_cast<std::size_t>(i)];
      const Eigen::Map<const Eigen::VectorXd> a(row.coefficients.data(), p_);
      const double sign = row.relation == Relation::greater_equal ? 1.0 : -1.0;
      problem_.rows.row(i) = sign * (a.transpose() * transform_);
      // Shifted inward by one to two feasibility tolerances: rows the solver
      // accepts then hold exactly, and the uneven shift breaks the ties that
      // make tensor-grid vertices degenerate.
      const double jitter = std::fmod(0.6180339887498949 * static_cast<double>(i), 1.0);
      problem_.rhs(i) = sign * row.rhs + config_.solver_tol * (1.0 + jitter);
    }
    if (bounds > 0) {
      problem_.rows.bottomRows(bounds).setZero();
      problem_.rows.bottomRightCorner(bounds, bounds).setIdentity();
      problem_.rhs.tail(bounds).setZero();
    }
    QpOptions opts;
    opts.feasibility_tol = config_.solver_tol;
    opts.max_iter = config_.max_iter;
    QpResult qp = solve_qp(problem_, opts, start);
    // Map certificate rows back to compiled row indices (bound rows excluded).
    const Eigen::VectorXd theta = transform_ * qp.x;
    for (double& f : qp.objective_trace) f += constant_;
    return {PolyModel(variables_, config_.degree,
                      std::vector<double>(theta.data(), theta.data() + theta.size())),
            std::move(qp)};
  }

 private:
  const ScprConfig& config_;
  std::vector<std::string> variables_;
  Eigen::Index p_;
  bool split_ = false;
  double constant_ = 0.0;
  Eigen::MatrixXd transform_;
  QpProblem problem_;
};

double max_row_violation(const LinearConstraintSystem& system, const PolyModel& model) {
  double worst = 0.0;
  const auto& theta = model.coefficients();
  for (const auto& row : system.rows) {
    double lhs = 0.0;
    for (std::size_t t = 0; t < theta.size(); ++t) lhs += row.coefficients[t] * theta[t];
    const double viol = row.relation == Relation::greater_equal ? row.rhs - lhs : lhs - row.rhs;
    worst = std::max(worst, viol);
  }
  return worst;
}

double rmse(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, const PolyModel& model) {
  const Eigen::Map<const Eigen::VectorXd> theta(model.coefficients().data(),
                                                static_cast<Eigen::Index>(model.n_terms()));
  return std::sqrt((X * theta - y).squaredNorm() / static_cast<double>(y.size()));
}

CertifyOptions certify_options(const ScprConfig& config) {
  CertifyOptions opts;
  opts.grid = config.cert_grid;
  opts.max_points = config.cert_max_points;
  opts.tol = config.cert_tol;
  opts.max_boxes = config.cert_max_boxes;
  return opts;
}

ScprFit fit_impl(const Dataset& data, const std::vector<std::string>& variables,
                 const ScprConfig& config, const std::vector<ShapeConstraint>* constraints) {
  config.validate();
  const auto t0 = std::chrono::steady_clock::now();
  const auto [X, y] = build_design_matrix(data, variables, data.target(), config.degree);
  ElasticNetQp qp(X, y, config, variables);

  LinearConstraintSystem system;
  system.n_terms = static_cast<std::size_t>(X.cols());
  int grid = config.grid_points_per_dim;
  if (constraints) system = compile_constraints(*constraints, variables, config.degree, grid);
  Solved solved = qp.solve(system);

  std::optional<CertificationReport> cert;
  int rounds = 0;
  if (constraints && config.refine) {
    const CertifyOptions copts = certify_options(config);
    cert = certify(solved.model, *constraints, copts);
    if (cert->any_violated()) {
      grid *= 2;
      system = compile_constraints(*constraints, variables, config.degree, grid);
      solved = qp.solve(system, solved.qp.x);
      cert = certify(solved.model, *constraints, copts);
    }
    // Exchange rounds: enforce each violated constraint at its worst breaches,
    // each pushed to the local worst by pattern search.
    while (cert->any_violated() && rounds < config.refine_rounds) {
      ++rounds;
      for (std::size_t c = 0; c < constraints->size(); ++c) {
        const ConstraintCertificate& cc = cert->constraints[c];
        if (cc.status != CertStatus::violated) continue;
        const ShapeConstraint& sc = (*constraints)[c];
        const auto [lo, hi] = sc.region_bounds(variables);
        const int per_dim = dense_points_per_dim(lo.size(), copts);
        double spacing = 0.0;
        for (std::size_t v = 0; v < lo.size(); ++v) {
          spacing = std::max(spacing, (hi[v] - lo[v]) / std::max(1, per_dim - 1));
        }
        const PolyModel q = solved.model.derivative(sc.derivative_index(variables));
        GridScan scan = scan_grid(q, sc.bound, dense_axes(lo, hi, copts), copts.tol);
        std::sort(scan.breaches.begin(), scan.breaches.end(),
                  [](const auto& a, const auto& b) { return a.first > b.first; });
        std::vector<std::vector<double>> seeds;
        for (const auto& [viol, point] : scan.breaches) {
          if (seeds.size() >= kExchangePoints) break;
          const bool isolated = std::all_of(seeds.begin(), seeds.end(), [&](const auto& s) {
            double d = 0.0;
            for (std::size_t v = 0; v < s.size(); ++v) d = std::max(d, std::abs(s[v] - point[v]));
            return d > 3.0 * spacing;
          });
          if (isolated) seeds.push_back(point);
        }
        if (seeds.empty()) seeds.push_back(cc.worst_point);
        std::vector<std::vector<double>> points;
        for (const auto& seed : seeds) {
          points.push_back(refine_worst_point(q, sc.bound, seed, lo, hi, spacing));
          points.push_back(seed);
        }
        system.append(compile_at_points(sc, c, variables, config.degree, points));
      }
      solved = qp.solve(system, solved.qp.x);
      cert = certify(solved.model, *constraints, copts);
    }
  }

  ScprFit fit{std::move(solved.model), {}};
  FitReport& r = fit.report;
  r.train_rmse = rmse(X, y, fit.model);
  r.objective_value = solved.qp.objective_trace.back();
  r.iterations = solved.qp.iterations;
  r.max_sampled_violation = max_row_violation(system, fit.model);
  r.constraint_rows = system.rows.size();
  r.grid_points_per_dim = constraints ? grid : 0;
  r.refinement_rounds = rounds;
  r.phase_one = solved.qp.phase_one;
  r.objective_trace = std::move(solved.qp.objective_trace);
  r.certification = std::move(cert);
  r.wall_time_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return fit;
}

}  // namespace

void ScprConfig::validate() const {
  if (degree < 1) throw ConfigError("degree must be at least 1");
  if (!(lambda >= 0.0)) throw ConfigError("lambda must be non-negative");
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw ConfigError("alpha must lie in [0, 1]");
  if (grid_points_per_dim < 1) throw ConfigError("grid_points_per_dim must be positive");
  if (!(solver_tol > 0.0)) throw ConfigError("solver_tol must be positive");
  if (max_iter < 1) throw ConfigError("max_iter must be positive");
  if (cert_grid < 2) throw ConfigError("cert_grid must be at least 2");
  if (!(cert_tol >= 0.0)) throw ConfigError("cert_tol must be non-negative");
}

void LinearConstraintSystem::append(const LinearConstraintSystem& other) {
  rows.insert(rows.end(), other.rows.begin(), other.rows.end());
}

std::pair<Eigen::MatrixXd, Eigen::VectorXd> build_design_matrix(
    const Dataset& data, const std::vector<std::string>& variables, const std::string& target,
    int degree) {
  std::vector<std::span<const double>> cols;
  for (const auto& v : variables) cols.push_back(data.column(v));
  const std::span<const double> y = data.column(target);
  const std::size_t n = data.rows();
  if (n == 0) throw SchemaError("dataset has no rows");
  const std::vector<MultiIndex> basis = monomial_basis(variables.size(), degree);
  Eigen::MatrixXd X(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(basis.size()));
  Eigen::VectorXd yv(static_cast<Eigen::Index>(n));
  std::vector<std::vector<double>> powers(variables.size(), std::vector<double>(degree + 1));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t v = 0; v < cols.size(); ++v) {
      if (!std::isfinite(cols[v][i])) {
        throw DataError("non-finite value in column '" + variables[v] + "'", i + 2, variables[v]);
      }
      powers[v][0] = 1.0;
      for (int e = 1; e <= degree; ++e) powers[v][e] = powers[v][e - 1] * cols[v][i];
    }
    if (!std::isfinite(y[i])) throw DataError("non-finite target value", i + 2, target);
    for (std::size_t t = 0; t < basis.size(); ++t) {
      double value = 1.0;
      for (std::size_t v = 0; v < cols.size(); ++v) value *= powers[v][basis[t].exponents[v]];
      X(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(t)) = value;
    }
    yv(static_cast<Eigen::Index>(i)) = y[i];
  }
  return {std::move(X), std::move(yv)};
}

LinearConstraintSystem compile_at_points(const ShapeConstraint& constraint, std::size_t index,
                                         const std::vector<std::string>& variables, int degree,
                                         const std::vector<std::vector<double>>& points) {
  const std::vector<MultiIndex> basis = monomial_basis(variables.size(), degree);
  const MultiIndex wrt = constraint.derivative_index(variables);
  LinearConstraintSystem system;
  system.n_terms = basis.size();
  for (const auto& point : points) {
    std::vector<double> row = derivative_row(basis, wrt, point);
    if (std::isfinite(constraint.bound.lo())) {
      system.rows.push_back({row, Relation::greater_equal, constraint.bound.lo(), index, point});
    }
    if (std::isfinite(constraint.bound.hi())) {
      system.rows.push_back({row, Relation::less_equal, constraint.bound.hi(), index, point});
    }
  }
  return system;
}

LinearConstraintSystem compile_constraints(const std::vector<ShapeConstraint>& constraints,
                                           const std::vector<std::string>& variables, int degree,
                                           int grid_points_per_dim) {
  LinearConstraintSystem system;
  system.n_terms = monomial_basis(variables.size(), degree).size();
  // Budget check before materialising anything.
  double total = 0.0;
  for (const auto& c : constraints) {
    const auto [lo, hi] = c.region_bounds(variables);
    double points = 1.0;
    for (std::size_t v = 0; v < lo.size(); ++v) points *= lo[v] == hi[v] ? 1.0 : grid_points_per_dim;
    const double sides = (std::isfinite(c.bound.lo()) ? 1.0 : 0.0) + (std::isfinite(c.bound.hi()) ? 1.0 : 0.0);
    total += points * sides;
  }
  if (total > static_cast<double>(kMaxConstraintRows)) {
    throw BudgetError("constraint grid needs " + std::to_string(static_cast<long long>(total)) +
                      " rows (limit " + std::to_string(kMaxConstraintRows) +
                      "); lower grid_points_per_dim");
  }
  for (std::size_t ci = 0; ci < constraints.size(); ++ci) {
    const ShapeConstraint& c = constraints[ci];
    const auto [lo, hi] = c.region_bounds(variables);
    std::vector<std::vector<double>> axes(lo.size());
    for (std::size_t v = 0; v < lo.size(); ++v) axes[v] = linspace(lo[v], hi[v], grid_points_per_dim);
    std::vector<std::vector<double>> points;
    std::vector<std::size_t> idx(lo.size(), 0);
    while (true) {
      std::vector<double> point(lo.size());
      for (std::size_t v = 0; v < lo.size(); ++v) point[v] = axes[v][idx[v]];
      points.push_back(std::move(point));
      std::size_t v = 0;
      while (v < lo.size() && ++idx[v] == axes[v].size()) idx[v++] = 0;
      if (v == lo.size()) break;
    }
    system.append(compile_at_points(c, ci, variables, degree, points));
  }
  return system;
}

std::string to_string(CertStatus status) {
  switch (status) {
    case CertStatus::certified: return "CERTIFIED";
    case CertStatus::violated: return "VIOLATED";
    case CertStatus::undecided: return "UNDECIDED";
  }
  return "UNDECIDED";
}

bool CertificationReport::all_certified() const {
  return std::all_of(constraints.begin(), constraints.end(),
                     [](const auto& c) { return c.status == CertStatus::certified; });
}

bool CertificationReport::any_violated() const {
  return std::any_of(constraints.begin(), constraints.end(),
                     [](const auto& c) { return c.status == CertStatus::violated; });
}

CertificationReport certify(const PolyModel& model, const std::vector<ShapeConstraint>& constraints,
                            const CertifyOptions& options) {
  CertificationReport report;
  report.variables = model.variables();
  for (const auto& c : constraints) report.constraints.push_back(certify_one(model, c, options));
  return report;
}

ScprFit fit_unconstrained(const Dataset& data, const std::vector<std::string>& variables,
                          const ScprConfig& config) {
  return fit_impl(data, variables, config, nullptr);
}

ScprFit fit_unconstrained(const Dataset& data, const ScprConfig& config) {
  return fit_unconstrained(data, data.feature_names(), config);
}

ScprFit fit_constrained(const Dataset& data, const std::vector<std::string>& variables,
                        const ScprConfig& config, const std::vector<ShapeConstraint>& constraints) {
  return fit_impl(data, variables, config, &constraints);
}

ScprFit fit_constrained(const Dataset& data, const ScprConfig& config,
                        const std::vector<ShapeConstraint>& constraints) {
  return fit_constrained(data, data.feature_names(), config, constraints);
}

std::vector<double> predict(const PolyModel& model, const Dataset& data) {
  std::vector<std::span<const double>> cols;
  for (const auto& v : model.variables()) cols.push_back(data.column(v));
  std::vector<double> out(data.rows());
  std::vector<double> point(cols.size());
  for (std::size_t i = 0; i < data.rows(); ++i) {
    for (std::size_t v = 0; v < cols.size(); ++v) point[v] = cols[v][i];
    out[i] = model.eval(point);
  }
  return out;
}

}  // namespace shapeguard
