#include "shapeguard/validation.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <sstream>
#include <thread>

#include "shapeguard/error.hpp"
#include "shapeguard/polynomial.hpp"

namespace shapeguard {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Runs fn(0..n-1) on up to `threads` workers. Each index writes only its own slot.
void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& fn) {
  const auto workers = std::min<std::size_t>(n, static_cast<std::size_t>(std::max(1, threads)));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) fn(i);
    });
  }
  for (auto& t : pool) t.join();
}

Dataset scaled_copy(const Dataset& data) {
  auto [scaled, record] = scale_unit(data, data.column_names());
  scaled.label = data.label;
  scaled.error = data.error;
  return scaled;
}

double rmse(std::span<const double> pred, std::span<const double> y) {
  double s = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) s += (pred[i] - y[i]) * (pred[i] - y[i]);
  return std::sqrt(s / static_cast<double>(y.size()));
}

struct FoldOutcome {
  double test_rmse = kInf;
  int stopping_generation = -1;
};

FoldOutcome run_fold(const ModelConfig& config, const Dataset& train, const Dataset& test,
                     const std::vector<ShapeConstraint>& constraints) {
  FoldOutcome out;
  const TrainedModel m = train_model(config, train, constraints, &test);
  if (config.algorithm == Algorithm::scsr) {
    const std::size_t stop = select_stopping_generation(m.history);
    out.stopping_generation = static_cast<int>(stop);
    out.test_rmse = m.history[stop].best_test_rmse;
  } else {
    out.test_rmse = rmse(m.predict(test), test.target_values());
  }
  if (!std::isfinite(out.test_rmse)) throw DegenerateError("non-finite fold test error");
  return out;
}

bool near_equal(double a, double b) {
  return std::abs(a - b) <= 1e-9 * std::max({1.0, std::abs(a), std::abs(b)});
}

}  // namespace

std::vector<Segment> segment(const Dataset& data, const std::vector<std::string>& controlled) {
  std::vector<std::span<const double>> cols;
  for (const auto& c : controlled) cols.push_back(data.column(c));
  std::vector<Segment> out;
  const std::size_t n = data.rows();
  auto snapshot = [&](std::size_t row) {
    std::vector<double> v;
    for (const auto& c : cols) v.push_back(c[row]);
    return v;
  };
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<double> now = snapshot(i);
    if (out.empty() || now != out.back().controlled) {
      if (!out.empty()) out.back().end = i;
      out.push_back({i, n, std::move(now)});
    }
  }
  return out;
}

std::vector<double> score_segments(std::span<const double> predictions,
                                   std::span<const double> target,
                                   const std::vector<Segment>& segments) {
  if (predictions.size() != target.size()) throw ArityError("prediction and target lengths differ");
  std::vector<double> out;
  for (const auto& s : segments) {
    if (s.end > target.size() || s.start >= s.end) throw ArityError("segment outside the data");
    out.push_back(rmse(predictions.subspan(s.start, s.end - s.start),
                       target.subspan(s.start, s.end - s.start)));
  }
  return out;
}

Label classify(const std::vector<double>& segment_rmse, double t) {
  if (!(t > 0.0)) throw ConfigError("threshold must be positive");
  for (double r : segment_rmse) {
    if (r > t || std::isnan(r)) return Label::invalid;
  }
  return Label::valid;
}

RocCurve roc(std::span<const double> scores, std::span<const Label> labels) {
  if (scores.size() != labels.size()) throw ArityError("score and label counts differ");
  std::size_t pos = 0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (std::isnan(scores[i])) throw DomainError("NaN score");
    if (labels[i] == Label::invalid) ++pos;
  }
  const std::size_t neg = scores.size() - pos;
  if (pos == 0 || neg == 0) throw DegenerateError("ROC needs both valid and invalid datasets");

  std::vector<std::size_t> order(scores.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
  RocCurve c;
  c.points.emplace_back(0.0, 0.0);
  c.thresholds.push_back(kInf);
  std::size_t tp = 0, fp = 0;
  const auto P = static_cast<double>(pos), N = static_cast<double>(neg);
  for (std::size_t k = 0; k < order.size();) {
    const double t = scores[order[k]];
    // Threshold t flags everything strictly above it: the previous groups.
    c.points.emplace_back(static_cast<double>(fp) / N, static_cast<double>(tp) / P);
    c.thresholds.push_back(t);
    while (k < order.size() && scores[order[k]] == t) {
      (labels[order[k]] == Label::invalid ? tp : fp)++;
      ++k;
    }
  }
  c.points.emplace_back(1.0, 1.0);
  c.thresholds.push_back(-kInf);
  for (std::size_t i = 1; i < c.points.size(); ++i) {
    const auto [x0, y0] = c.points[i - 1];
    const auto [x1, y1] = c.points[i];
    c.auc += (x1 - x0) * 0.5 * (y0 + y1);
  }
  return c;
}

std::string roc_to_csv(const RocCurve& curve) {
  std::ostringstream out;
  out << "threshold,fpr,tpr\n";
  for (std::size_t i = 0; i < curve.points.size(); ++i) {
    out << format_double(curve.thresholds[i]) << ',' << format_double(curve.points[i].first) << ','
        << format_double(curve.points[i].second) << '\n';
  }
  return out.str();
}

void ValidationConfig::validate() const {
  if (!(threshold > 0.0)) throw ConfigError("threshold t must be positive");
  if (threads < 1) throw ConfigError("threads must be at least 1");
}

ValidationReport validate_dataset(const Dataset& data, const ValidationConfig& config,
                                  const std::vector<ShapeConstraint>& constraints) {
  config.validate();
  if (data.rows() == 0) throw SchemaError("dataset '" + data.name() + "' has no rows");
  ValidationReport r;
  r.dataset = data.name();
  r.truth = data.label;
  r.error_annotation = data.error;
  const Dataset scaled = scaled_copy(data);
  std::vector<std::string> controlled;
  for (const auto& c : config.controlled) {
    if (scaled.has_column(c) && c != scaled.target()) controlled.push_back(c);
  }
  r.segments = segment(scaled, controlled);
  const TrainedModel m = train_model(config.model, scaled, constraints);
  const auto pred = m.predict(scaled);
  r.segment_rmse = score_segments(pred, scaled.target_values(), r.segments);
  r.score = r.segment_rmse.empty() ? 0.0 : *std::max_element(r.segment_rmse.begin(), r.segment_rmse.end());
  r.verdict = classify(r.segment_rmse, config.threshold);
  r.fit = m.fit;
  if (m.fit) r.certification = m.fit->certification;
  r.tree_check = m.tree_check;
  r.model_json = m.model_json();
  return r;
}

CorpusReport validate_corpus(const std::vector<Dataset>& datasets, const ValidationConfig& config,
                             const std::vector<ShapeConstraint>& constraints) {
  config.validate();
  CorpusReport out;
  out.reports.resize(datasets.size());
  parallel_for(datasets.size(), config.threads, [&](std::size_t i) {
    try {
      out.reports[i] = validate_dataset(datasets[i], config, constraints);
    } catch (const std::exception& e) {
      ValidationReport& r = out.reports[i];
      r = {};
      r.dataset = datasets[i].name();
      r.truth = datasets[i].label;
      r.error_annotation = datasets[i].error;
      r.failure = e.what();
    }
  });
  std::vector<double> scores;
  std::vector<Label> labels;
  for (const auto& r : out.reports) {
    if (!r.failure.empty()) {
      ++out.confusion.failed;
      continue;
    }
    if (!r.truth) {
      ++out.confusion.unlabeled;
      continue;
    }
    const bool flagged = *r.verdict == Label::invalid;
    const bool bad = *r.truth == Label::invalid;
    if (flagged && bad) ++out.confusion.true_positive;
    if (flagged && !bad) ++out.confusion.false_positive;
    if (!flagged && !bad) ++out.confusion.true_negative;
    if (!flagged && bad) ++out.confusion.false_negative;
    scores.push_back(r.score);
    labels.push_back(*r.truth);
  }
  const bool both = std::count(labels.begin(), labels.end(), Label::invalid) > 0 &&
                    std::count(labels.begin(), labels.end(), Label::valid) > 0;
  if (both) out.roc = roc(scores, labels);
  return out;
}

int cell_degree(const ModelConfig& config) {
  switch (config.algorithm) {
    case Algorithm::gbt: return config.gbt.max_depth;
    case Algorithm::scsr: return config.ga.max_size;
    default: return config.scpr.degree;
  }
}

double cell_lambda(const ModelConfig& config) {
  switch (config.algorithm) {
    case Algorithm::gbt: return config.gbt.lambda;
    case Algorithm::scsr: return 0.0;
    default: return config.scpr.lambda;
  }
}

double cell_alpha(const ModelConfig& config) {
  switch (config.algorithm) {
    case Algorithm::gbt: return config.gbt.alpha;
    case Algorithm::scsr: return 0.0;
    default: return config.scpr.alpha;
  }
}

std::vector<ModelConfig> default_scpr_grid(const ModelConfig& base) {
  std::vector<ModelConfig> grid;
  for (int d = 2; d <= 6; ++d) {
    for (int e = -6; e <= 1; ++e) {
      for (double a : {0.0, 0.5, 1.0}) {
        ModelConfig c = base;
        c.scpr.degree = d;
        c.scpr.lambda = std::pow(10.0, e);
        c.scpr.alpha = a;
        grid.push_back(c);
      }
    }
  }
  return grid;
}

GridSearchResult grid_search(const std::vector<Dataset>& datasets,
                             const std::vector<ModelConfig>& grid,
                             const std::vector<ShapeConstraint>& constraints, int threads) {
  if (datasets.size() < 2) throw ConfigError("grid search needs at least 2 datasets");
  if (grid.empty()) throw ConfigError("grid search needs a non-empty grid");
  std::vector<std::pair<Dataset, Dataset>> folds;
  for (const auto& d : datasets) {
    const Dataset s = scaled_copy(d);
    const std::size_t half = s.rows() / 2;
    if (half == 0) throw SchemaError("dataset '" + d.name() + "' is too small to split");
    folds.emplace_back(s.slice(0, half), s.slice(half, s.rows()));
  }

  GridSearchResult result;
  result.cells.resize(grid.size());
  parallel_for(grid.size(), threads, [&](std::size_t i) {
    GridCellResult& cell = result.cells[i];
    cell.config = grid[i];
    cell.degree = cell_degree(grid[i]);
    cell.lambda = cell_lambda(grid[i]);
    cell.alpha = cell_alpha(grid[i]);
    double sum = 0.0;
    std::vector<int> stops;
    for (const auto& [a, b] : folds) {
      for (int k = 0; k < 2; ++k) {
        const Dataset& train = k == 0 ? a : b;
        const Dataset& test = k == 0 ? b : a;
        try {
          const FoldOutcome f = run_fold(grid[i], train, test, constraints);
          sum += f.test_rmse;
          ++cell.fits;
          if (f.stopping_generation >= 0) stops.push_back(f.stopping_generation);
        } catch (const Error&) {
          ++cell.failures;
        }
      }
    }
    cell.failed = cell.fits == 0;
    cell.score = cell.failed ? kInf : sum;
    if (!stops.empty()) {
      std::sort(stops.begin(), stops.end());
      cell.stopping_generation = stops[(stops.size() - 1) / 2];
      cell.config.ga.max_generations = cell.stopping_generation;
    }
  });

  bool any = false;
  for (std::size_t i = 0; i < result.cells.size(); ++i) {
    const auto& c = result.cells[i];
    if (c.failed) continue;
    if (!any) {
      result.best = i;
      any = true;
      continue;
    }
    const auto& b = result.cells[result.best];
    bool win;
    if (c.failures != b.failures) win = c.failures < b.failures;
    else if (!near_equal(c.score, b.score)) win = c.score < b.score;
    else if (c.degree != b.degree) win = c.degree < b.degree;
    else win = c.lambda > b.lambda;
    if (win) result.best = i;
  }
  if (!any) throw GridError("every grid cell failed");
  return result;
}

std::string grid_to_csv(const GridSearchResult& result) {
  std::ostringstream out;
  out << "algorithm,degree,lambda,alpha,score,fits,failures,failed,best\n";
  for (std::size_t i = 0; i < result.cells.size(); ++i) {
    const auto& c = result.cells[i];
    out << to_string(c.config.algorithm) << ',' << c.degree << ',' << format_double(c.lambda) << ','
        << format_double(c.alpha) << ',' << format_double(c.score) << ',' << c.fits << ','
        << c.failures << ',' << (c.failed ? 1 : 0) << ',' << (i == result.best ? 1 : 0) << '\n';
  }
  return out.str();
}

int default_threads() {
  if (const char* env = std::getenv("SHAPEGUARD_THREADS")) {
    const int n = std::atoi(env);
    if (n > 0) return n;
  }
  return 1;
}

}  // namespace shapeguard
