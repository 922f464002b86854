#include "shapeguard/model.hpp"

#include <algorithm>
#include <cmath>

#include "shapeguard/error.hpp"

namespace shapeguard {

Algorithm parse_algorithm(const std::string& name) {
  if (name == "pr") return Algorithm::pr;
  if (name == "scpr") return Algorithm::scpr;
  if (name == "scsr") return Algorithm::scsr;
  if (name == "gbt") return Algorithm::gbt;
  throw ConfigError("unknown algorithm '" + name + "' (expected pr, scpr, scsr or gbt)");
}

std::string to_string(Algorithm algorithm) {
  switch (algorithm) {
    case Algorithm::pr: return "pr";
    case Algorithm::scpr: return "scpr";
    case Algorithm::scsr: return "scsr";
    case Algorithm::gbt: return "gbt";
  }
  return "unknown";
}

std::map<std::string, int> monotone_from_constraints(const std::vector<ShapeConstraint>& constraints) {
  std::map<std::string, int> out;
  for (const auto& c : constraints) {
    if (c.order() != 1) continue;
    bool whole = true;
    for (const auto& [name, iv] : c.region.dims()) {
      if (!(iv.lo() <= 0.0 && iv.hi() >= 1.0)) whole = false;
    }
    if (!whole) continue;
    if (c.bound.lo() >= 0.0) out[c.wrt[0]] = 1;
    else if (c.bound.hi() <= 0.0) out[c.wrt[0]] = -1;
  }
  return out;
}

std::vector<double> TrainedModel::predict(const Dataset& data) const {
  if (const auto* poly = std::get_if<PolyModel>(&model)) return shapeguard::predict(*poly, data);
  if (const auto* tree = std::get_if<ScaledTree>(&model)) return predict_tree(*tree, data);
  return predict_gbt(std::get<GBTEnsemble>(model), data);
}

std::string TrainedModel::model_json() const {
  if (const auto* poly = std::get_if<PolyModel>(&model)) return poly_to_json(*poly);
  if (const auto* tree = std::get_if<ScaledTree>(&model)) return scaled_to_json(*tree);
  return gbt_to_json(std::get<GBTEnsemble>(model));
}

TrainedModel train_model(const ModelConfig& config, const Dataset& train,
                         const std::vector<ShapeConstraint>& constraints, const Dataset* test) {
  TrainedModel out;
  out.algorithm = config.algorithm;
  switch (config.algorithm) {
    case Algorithm::pr: {
      ScprFit fit = fit_unconstrained(train, config.scpr);
      out.model = std::move(fit.model);
      out.fit = std::move(fit.report);
      break;
    }
    case Algorithm::scpr: {
      ScprFit fit = fit_constrained(train, config.scpr, constraints);
      out.model = std::move(fit.model);
      out.fit = std::move(fit.report);
      break;
    }
    case Algorithm::scsr: {
      out.history = evolve(train, test ? *test : train, config.ga, constraints);
      const auto& last = out.history.back();
      if (!last.best) throw DegenerateError("no evolved tree satisfies the constraints");
      out.tree_check = check_constraints(*last.best, constraints);
      out.model = *last.best;
      break;
    }
    case Algorithm::gbt: {
      GBTConfig gbt = config.gbt;
      if (gbt.monotone.empty()) {
        const auto features = train.feature_names();
        for (const auto& [name, dir] : monotone_from_constraints(constraints)) {
          if (std::find(features.begin(), features.end(), name) != features.end()) {
            gbt.monotone[name] = dir;
          }
        }
      }
      out.model = fit_gbt(train, gbt);
      break;
    }
  }
  return out;
}

}  // namespace shapeguard
