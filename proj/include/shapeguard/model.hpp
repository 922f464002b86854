#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "shapeguard/constraint_spec.hpp"
#include "shapeguard/dataset.hpp"
#include "shapeguard/gbt.hpp"
#include "shapeguard/scpr.hpp"
#include "shapeguard/scsr.hpp"

namespace shapeguard {

enum class Algorithm { pr, scpr, scsr, gbt };

/// Throws ConfigError on anything but pr, scpr, scsr, gbt.
Algorithm parse_algorithm(const std::string& name);
std::string to_string(Algorithm algorithm);

/// One algorithm and the configuration blocks of every algorithm.
struct ModelConfig {
  Algorithm algorithm = Algorithm::scpr;
  ScprConfig scpr;
  GAConfig ga;
  GBTConfig gbt;
};

/// Monotone directions implied by first-derivative sign constraints that
/// cover the whole box: `d1 x <= 0` gives -1, `d1 x >= 0` gives +1.
std::map<std::string, int> monotone_from_constraints(const std::vector<ShapeConstraint>& constraints);

struct TrainedModel {
  Algorithm algorithm = Algorithm::pr;
  std::variant<PolyModel, ScaledTree, GBTEnsemble> model;
  std::optional<FitReport> fit;
  /// Interval check of an evolved tree against the constraints.
  std::optional<ConstraintCheck> tree_check;
  std::vector<GenerationRecord> history;

  std::vector<double> predict(const Dataset& data) const;
  std::string model_json() const;
};

/// Fits `config.algorithm` on every non-target column of `train`. pr ignores
/// the constraints; gbt uses only their whole-box monotone directions unless
/// its config already lists some. scsr evaluates test error on `test` when
/// given, otherwise on `train`, and returns the best tree of the last
/// generation. Throws DegenerateError when scsr finds no feasible tree.
TrainedModel train_model(const ModelConfig& config, const Dataset& train,
                         const std::vector<ShapeConstraint>& constraints,
                         const Dataset* test = nullptr);

}  // namespace shapeguard
