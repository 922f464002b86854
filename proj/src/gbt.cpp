#include "shapeguard/gbt.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include <json.hpp>

#include "shapeguard/error.hpp"

namespace shapeguard {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double shrink(double g, double alpha) {
  if (g > alpha) return g - alpha;
  if (g < -alpha) return g + alpha;
  return 0.0;
}

struct Stats {
  double g = 0.0;
  double h = 0.0;
};

class TreeBuilder {
 public:
  TreeBuilder(const std::vector<std::span<const double>>& x, const std::vector<double>& grad,
              const GBTConfig& config, const std::vector<int>& direction)
      : x_(x), grad_(grad), config_(config), direction_(direction) {}

  RegTree build(std::vector<std::size_t> rows) {
    tree_.nodes.clear();
    grow(std::move(rows), 0, -kInf, kInf);
    return std::move(tree_);
  }

 private:
  double weight(const Stats& s, double lo, double hi) const {
    return std::clamp(-shrink(s.g, config_.alpha) / (s.h + config_.lambda), lo, hi);
  }

  // Loss reduction relative to a zero weight.
  double score(const Stats& s, double w) const {
    return -(s.g * w + 0.5 * (s.h + config_.lambda) * w * w + config_.alpha * std::abs(w));
  }

  int grow(std::vector<std::size_t> rows, int depth, double lo, double hi) {
    Stats total;
    for (auto r : rows) total.g += grad_[r], total.h += 1.0;
    const int id = static_cast<int>(tree_.nodes.size());
    RegTree::Node leaf;
    leaf.weight = weight(total, lo, hi);
    leaf.lower = lo;
    leaf.upper = hi;
    tree_.nodes.push_back(leaf);
    const auto min_leaf = static_cast<std::size_t>(config_.min_samples_leaf);
    if (depth >= config_.max_depth || rows.size() < 2 * min_leaf) return id;

    const double parent = score(total, leaf.weight);
    double best_gain = 1e-12 * std::max(1.0, std::abs(parent));
    int best_feature = -1;
    double best_threshold = 0.0, best_wl = 0.0, best_wr = 0.0;
    std::vector<std::size_t> order = rows;
    for (std::size_t f = 0; f < x_.size(); ++f) {
      const auto& col = x_[f];
      std::stable_sort(order.begin(), order.end(),
                       [&](std::size_t a, std::size_t b) { return col[a] < col[b]; });
      Stats left;
      for (std::size_t k = 0; k + 1 < order.size(); ++k) {
        left.g += grad_[order[k]];
        left.h += 1.0;
        if (k + 1 < min_leaf || order.size() - k - 1 < min_leaf) continue;
        const double va = col[order[k]];
        const double vb = col[order[k + 1]];
        if (!(va < vb)) continue;
        const Stats right{total.g - left.g, total.h - left.h};
        const double wl = weight(left, lo, hi);
        const double wr = weight(right, lo, hi);
        const int dir = direction_[f];
        if ((dir > 0 && wl > wr) || (dir < 0 && wl < wr)) continue;
        const double gain = score(left, wl) + score(right, wr) - parent;
        if (gain > best_gain) {
          best_gain = gain;
          best_feature = static_cast<int>(f);
          best_threshold = va + 0.5 * (vb - va);
          if (!(best_threshold > va)) best_threshold = vb;
          best_wl = wl;
          best_wr = wr;
        }
      }
    }
    if (best_feature < 0) return id;

    std::vector<std::size_t> lrows, rrows;
    const auto& col = x_[static_cast<std::size_t>(best_feature)];
    for (auto r : rows) (col[r] < best_threshold ? lrows : rrows).push_back(r);
    double llo = lo, lhi = hi, rlo = lo, rhi = hi;
    const int dir = direction_[static_cast<std::size_t>(best_feature)];
    const double mid = 0.5 * (best_wl + best_wr);
    if (dir > 0) {
      lhi = mid;
      rlo = mid;
    } else if (dir < 0) {
      llo = mid;
      rhi = mid;
    }
    const int l = grow(std::move(lrows), depth + 1, llo, lhi);
    const int r = grow(std::move(rrows), depth + 1, rlo, rhi);
    RegTree::Node& node = tree_.nodes[static_cast<std::size_t>(id)];
    node.feature = best_feature;
    node.threshold = best_threshold;
    node.left = l;
    node.right = r;
    return id;
  }

  const std::vector<std::span<const double>>& x_;
  const std::vector<double>& grad_;
  const GBTConfig& config_;
  const std::vector<int>& direction_;
  RegTree tree_;
};

nlohmann::json node_json(const RegTree& t, int id) {
  const auto& n = t.nodes[static_cast<std::size_t>(id)];
  if (n.feature < 0) return {{"leaf", n.weight}};
  return {{"feature", n.feature},
          {"threshold", n.threshold},
          {"left", node_json(t, n.left)},
          {"right", node_json(t, n.right)}};
}

int node_from_json(const nlohmann::json& j, RegTree& t) {
  const int id = static_cast<int>(t.nodes.size());
  t.nodes.emplace_back();
  if (j.contains("leaf")) {
    t.nodes.back().weight = j.at("leaf").get<double>();
    return id;
  }
  const int feature = j.at("feature").get<int>();
  const double threshold = j.at("threshold").get<double>();
  const int l = node_from_json(j.at("left"), t);
  const int r = node_from_json(j.at("right"), t);
  auto& n = t.nodes[static_cast<std::size_t>(id)];
  n.feature = feature;
  n.threshold = threshold;
  n.left = l;
  n.right = r;
  return id;
}

}  // namespace

void GBTConfig::validate() const {
  if (n_trees < 0) throw ConfigError("n_trees must be non-negative");
  if (!(learning_rate > 0.0)) throw ConfigError("learning_rate must be positive");
  if (max_depth < 0) throw ConfigError("max_depth must be non-negative");
  if (!(lambda >= 0.0) || !(alpha >= 0.0)) throw ConfigError("lambda and alpha must be non-negative");
  if (min_samples_leaf < 1) throw ConfigError("min_samples_leaf must be at least 1");
  if (!(subsample > 0.0 && subsample <= 1.0)) throw ConfigError("subsample must lie in (0, 1]");
  for (const auto& [name, dir] : monotone) {
    if (dir < -1 || dir > 1) throw ConfigError("monotone direction for '" + name + "' must be -1, 0 or 1");
  }
}

double RegTree::leaf_value(std::span<const double> x) const {
  if (nodes.empty()) return 0.0;
  std::size_t i = 0;
  while (nodes[i].feature >= 0) {
    const auto& n = nodes[i];
    i = static_cast<std::size_t>(x[static_cast<std::size_t>(n.feature)] < n.threshold ? n.left : n.right);
  }
  return nodes[i].weight;
}

GBTEnsemble fit_gbt(const Dataset& data, const GBTConfig& config) {
  config.validate();
  const std::size_t n = data.rows();
  if (n < static_cast<std::size_t>(config.min_samples_leaf) || n == 0) {
    throw SchemaError("dataset has fewer rows than min_samples_leaf");
  }
  GBTEnsemble ens;
  ens.features = data.feature_names();
  ens.learning_rate = config.learning_rate;
  for (const auto& [name, dir] : config.monotone) {
    if (std::find(ens.features.begin(), ens.features.end(), name) == ens.features.end()) {
      throw SchemaError("monotone constraint on unknown column '" + name + "'");
    }
  }
  std::vector<std::span<const double>> x;
  std::vector<int> direction;
  for (const auto& f : ens.features) {
    x.push_back(data.column(f));
    const auto it = config.monotone.find(f);
    direction.push_back(it == config.monotone.end() ? 0 : it->second);
  }
  const auto y = data.target_values();
  ens.base_score = std::accumulate(y.begin(), y.end(), 0.0) / static_cast<double>(n);

  std::vector<double> pred(n, ens.base_score), grad(n);
  std::mt19937_64 rng(config.seed);
  std::vector<std::size_t> all(n);
  std::iota(all.begin(), all.end(), 0);
  const auto sample_size = std::max<std::size_t>(
      static_cast<std::size_t>(config.min_samples_leaf),
      static_cast<std::size_t>(std::llround(config.subsample * static_cast<double>(n))));
  std::vector<double> point(x.size());
  for (int t = 0; t < config.n_trees; ++t) {
    for (std::size_t i = 0; i < n; ++i) grad[i] = pred[i] - y[i];
    std::vector<std::size_t> rows = all;
    if (sample_size < n) {
      std::shuffle(rows.begin(), rows.end(), rng);
      rows.resize(sample_size);
      std::sort(rows.begin(), rows.end());
    }
    RegTree tree = TreeBuilder(x, grad, config, direction).build(std::move(rows));
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t f = 0; f < x.size(); ++f) point[f] = x[f][i];
      pred[i] += config.learning_rate * tree.leaf_value(point);
    }
    ens.trees.push_back(std::move(tree));
  }
  return ens;
}

double predict_gbt(const GBTEnsemble& ensemble, std::span<const double> x) {
  double s = 0.0;
  for (const auto& t : ensemble.trees) s += t.leaf_value(x);
  return ensemble.base_score + ensemble.learning_rate * s;
}

std::vector<double> predict_gbt(const GBTEnsemble& ensemble, const Dataset& data) {
  std::vector<std::span<const double>> cols;
  for (const auto& f : ensemble.features) cols.push_back(data.column(f));
  std::vector<double> out(data.rows()), point(cols.size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    for (std::size_t f = 0; f < cols.size(); ++f) point[f] = cols[f][i];
    out[i] = predict_gbt(ensemble, point);
  }
  return out;
}

double monotonicity_audit(const GBTEnsemble& ensemble, const std::string& variable, int direction,
                          const std::vector<std::vector<double>>& grid) {
  if (std::find(ensemble.features.begin(), ensemble.features.end(), variable) ==
      ensemble.features.end()) {
    throw ArityError("ensemble has no feature '" + variable + "'");
  }
  double worst = 0.0;
  for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
    const double gap = (predict_gbt(ensemble, grid[i]) - predict_gbt(ensemble, grid[i + 1])) *
                       static_cast<double>(direction);
    worst = std::max(worst, gap);
  }
  return worst;
}

std::string gbt_to_json(const GBTEnsemble& ensemble) {
  nlohmann::json trees = nlohmann::json::array();
  for (const auto& t : ensemble.trees) trees.push_back(t.nodes.empty() ? nlohmann::json{{"leaf", 0.0}} : node_json(t, 0));
  const nlohmann::json j = {{"features", ensemble.features},
                            {"base_score", ensemble.base_score},
                            {"learning_rate", ensemble.learning_rate},
                            {"trees", trees}};
  return j.dump();
}

GBTEnsemble gbt_from_json(const std::string& text) {
  try {
    const auto j = nlohmann::json::parse(text);
    GBTEnsemble e;
    e.features = j.at("features").get<std::vector<std::string>>();
    e.base_score = j.at("base_score").get<double>();
    e.learning_rate = j.at("learning_rate").get<double>();
    for (const auto& t : j.at("trees")) {
      RegTree tree;
      node_from_json(t, tree);
      e.trees.push_back(std::move(tree));
    }
    return e;
  } catch (const nlohmann::json::exception& ex) {
    throw SchemaError(std::string("ensemble JSON: ") + ex.what());
  }
}

}  // namespace shapeguard
