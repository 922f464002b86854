#pragma once

#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "shapeguard/constraint_spec.hpp"
#include "shapeguard/dataset.hpp"
#include "shapeguard/model.hpp"

namespace shapeguard {

/// Rows [start, end) with constant controlled values.
struct Segment {
  std::size_t start = 0;
  std::size_t end = 0;
  std::vector<double> controlled;
};

/// Maximal runs of exactly equal controlled values, in row order. Throws
/// SchemaError on a missing column.
std::vector<Segment> segment(const Dataset& data, const std::vector<std::string>& controlled);

/// RMSE of `predictions` against `target` within each segment.
std::vector<double> score_segments(std::span<const double> predictions,
                                   std::span<const double> target,
                                   const std::vector<Segment>& segments);

/// invalid iff some segment RMSE is strictly above t; no segments is valid.
Label classify(const std::vector<double>& segment_rmse, double t);

struct RocCurve {
  /// (false positive rate, true positive rate), from (0,0) to (1,1).
  std::vector<std::pair<double, double>> points;
  /// Threshold of each point; a dataset is flagged invalid iff score > t.
  std::vector<double> thresholds;
  double auc = 0.0;
};

/// Sweeps t over +inf, every unique score in descending order, and -inf.
/// invalid is the positive class. Throws DegenerateError unless both labels
/// occur, DomainError on a NaN score.
RocCurve roc(std::span<const double> scores, std::span<const Label> labels);
std::string roc_to_csv(const RocCurve& curve);

struct ValidationConfig {
  double threshold = 0.05;
  /// Columns whose changes start a new segment; missing ones are skipped.
  std::vector<std::string> controlled{"p", "v"};
  ModelConfig model;
  int threads = 1;

  void validate() const;
};

struct ValidationReport {
  std::string dataset;
  std::optional<Label> truth;
  std::optional<ErrorAnnotation> error_annotation;
  std::vector<Segment> segments;
  std::vector<double> segment_rmse;
  /// Largest segment RMSE on the unit-scaled target.
  double score = std::numeric_limits<double>::quiet_NaN();
  std::optional<Label> verdict;
  std::optional<FitReport> fit;
  std::optional<CertificationReport> certification;
  std::optional<ConstraintCheck> tree_check;
  std::string model_json;
  /// Non-empty when the dataset could not be processed.
  std::string failure;
};

/// Scales every column to [0, 1], fits one model on the full data, scores
/// its segments and applies the threshold. Throws on fit failure.
ValidationReport validate_dataset(const Dataset& data, const ValidationConfig& config,
                                  const std::vector<ShapeConstraint>& constraints);

struct Confusion {
  int true_positive = 0;
  int false_positive = 0;
  int true_negative = 0;
  int false_negative = 0;
  int unlabeled = 0;
  int failed = 0;
};

struct CorpusReport {
  std::vector<ValidationReport> reports;
  Confusion confusion;
  /// Present when both labels occur among the processed datasets.
  std::optional<RocCurve> roc;
};

/// validate_dataset on every dataset; a failing dataset is recorded, not fatal.
/// Reports come back in input order whatever the thread count.
CorpusReport validate_corpus(const std::vector<Dataset>& datasets, const ValidationConfig& config,
                             const std::vector<ShapeConstraint>& constraints);

struct GridCellResult {
  ModelConfig config;
  int degree = 0;
  double lambda = 0.0;
  double alpha = 0.0;
  /// Sum of fold test RMSEs over every dataset and fold that fitted.
  double score = std::numeric_limits<double>::infinity();
  int fits = 0;
  int failures = 0;
  bool failed = false;
  /// scsr only: lower median of the per-fold best-test generations.
  int stopping_generation = -1;
};

struct GridSearchResult {
  std::vector<GridCellResult> cells;
  std::size_t best = 0;
};

/// Default grid for pr/scpr: d in 2..6, lambda 1e-6..1e1 (8 values), alpha in {0, 0.5, 1}.
std::vector<ModelConfig> default_scpr_grid(const ModelConfig& base);

/// Two-fold (contiguous halves) cross validation of every grid cell over the
/// unit-scaled datasets. Cells with more failed fits rank last, then the lowest
/// summed test RMSE wins; ties within 1e-9 relative go to the smallest degree,
/// then the largest lambda, then the earliest cell. Throws GridError when every
/// cell failed and ConfigError on fewer than 2 datasets or an empty grid.
GridSearchResult grid_search(const std::vector<Dataset>& datasets,
                             const std::vector<ModelConfig>& grid,
                             const std::vector<ShapeConstraint>& constraints, int threads = 1);

/// algorithm,degree,lambda,alpha,score,fits,failures,failed,best
std::string grid_to_csv(const GridSearchResult& result);

/// Degree-like and lambda-like coordinates of a cell for the tie rule.
int cell_degree(const ModelConfig& config);
double cell_lambda(const ModelConfig& config);
double cell_alpha(const ModelConfig& config);

/// `SHAPEGUARD_THREADS` when set and positive, otherwise 1.
int default_threads();

}  // namespace shapeguard
