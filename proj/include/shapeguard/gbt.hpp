#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "shapeguard/dataset.hpp"

namespace shapeguard {

struct GBTConfig {
  int n_trees = 100;
  double learning_rate = 0.1;
  int max_depth = 4;
  /// L2 penalty on leaf weights.
  double lambda = 1.0;
  /// L1 shrinkage of leaf gradient sums.
  double alpha = 0.0;
  int min_samples_leaf = 5;
  /// +1 non-decreasing, -1 non-increasing, over the whole range of the variable.
  std::map<std::string, int> monotone;
  /// Fraction of rows drawn (without replacement) per tree.
  double subsample = 1.0;
  std::uint64_t seed = 0;

  void validate() const;
};

/// Binary regression tree; rows with x[feature] < threshold go left.
struct RegTree {
  struct Node {
    int feature = -1;  // -1 marks a leaf
    double threshold = 0.0;
    int left = -1;
    int right = -1;
    /// Raw leaf weight, before the learning rate.
    double weight = 0.0;
    double lower = 0.0;
    double upper = 0.0;
  };
  std::vector<Node> nodes;

  double leaf_value(std::span<const double> x) const;
};

struct GBTEnsemble {
  std::vector<std::string> features;
  double base_score = 0.0;
  double learning_rate = 0.1;
  std::vector<RegTree> trees;
};

/// Squared-error boosting on every non-target column. Splits that break a
/// monotone direction are rejected and child weights are clamped to bounds
/// propagated from the parent split midpoint.
GBTEnsemble fit_gbt(const Dataset& data, const GBTConfig& config);

/// `x` is in ensemble feature order.
double predict_gbt(const GBTEnsemble& ensemble, std::span<const double> x);
std::vector<double> predict_gbt(const GBTEnsemble& ensemble, const Dataset& data);

/// Largest (pred(x_i) - pred(x_{i+1})) * direction over adjacent points, or 0.
/// Points are in ensemble feature order, sorted along `variable`.
double monotonicity_audit(const GBTEnsemble& ensemble, const std::string& variable, int direction,
                          const std::vector<std::vector<double>>& grid);

std::string gbt_to_json(const GBTEnsemble& ensemble);
GBTEnsemble gbt_from_json(const std::string& text);

}  // namespace shapeguard
