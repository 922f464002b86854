#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "shapeguard/constraint_spec.hpp"
#include "shapeguard/dataset.hpp"
#include "shapeguard/expr_tree.hpp"

namespace shapeguard {

struct GAConfig {
  int population = 500;
  int max_generations = 100;
  int tournament_size = 5;
  double crossover_prob = 0.9;
  double mutation_prob = 0.15;
  int max_size = 30;
  std::uint64_t seed = 0;
  int elitism = 1;
  /// Depth range of the ramped half-and-half initial population.
  int init_min_depth = 2;
  int init_max_depth = 4;
  /// Worker threads for fitness evaluation; results do not depend on it.
  int threads = 1;

  /// Throws ConfigError on out-of-range values.
  void validate() const;
};

struct GenerationRecord {
  int generation = 0;
  /// Of the best feasible individual; +inf when none is feasible.
  double best_train_rmse = 0.0;
  double best_test_rmse = 0.0;
  std::optional<ScaledTree> best;
  double feasible_fraction = 0.0;
};

/// Single-objective GA over expression trees on the non-target columns of
/// `train`. Fitness is train RMSE after least-squares affine output scaling;
/// individuals that fail check_constraints or produce non-finite output get
/// the worst feasible error (+inf when none is feasible). Returns one record
/// per generation, 0 through max_generations.
std::vector<GenerationRecord> evolve(const Dataset& train, const Dataset& test,
                                     const GAConfig& config,
                                     const std::vector<ShapeConstraint>& constraints,
                                     const std::optional<std::vector<ExprTree>>& initial = {});

/// Draws `size` indices uniformly with replacement; the lowest fitness wins,
/// ties going to the earliest draw.
std::size_t tournament_select(std::span<const double> fitness, int size, std::mt19937_64& rng);

/// Index of the lowest best_test_rmse; ties go to the earliest.
std::size_t select_stopping_generation(const std::vector<GenerationRecord>& history);

/// Least-squares slope and intercept mapping `outputs` onto `target`.
/// A constant output gets slope 0.
std::pair<double, double> affine_scaling(std::span<const double> outputs,
                                         std::span<const double> target);

std::vector<double> predict_tree(const ScaledTree& model, const Dataset& data);

/// "a + b * (expr)".
std::string scaled_infix(const ScaledTree& model);
std::string scaled_to_json(const ScaledTree& model);
ScaledTree scaled_from_json(const std::string& text);

/// generation,train_rmse,test_rmse,feasible_fraction
std::string history_to_csv(const std::vector<GenerationRecord>& history);

}  // namespace shapeguard
