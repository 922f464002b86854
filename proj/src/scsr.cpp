#include "shapeguard/scsr.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "shapeguard/error.hpp"
#include "shapeguard/polynomial.hpp"

namespace shapeguard {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Individual {
  ExprTree tree;
  bool feasible = false;
  double train_rmse = kInf;
  double fitness = kInf;
  double intercept = 0.0;
  double slope = 0.0;
};

struct Columns {
  std::vector<std::span<const double>> spans;
  std::span<const double> target;
  std::size_t rows = 0;
};

Columns columns_of(const Dataset& data, const std::vector<std::string>& vars) {
  Columns c;
  for (const auto& v : vars) c.spans.push_back(data.column(v));
  c.target = data.target_values();
  c.rows = data.rows();
  return c;
}

double rmse(std::span<const double> pred, std::span<const double> y) {
  if (y.empty()) return std::numeric_limits<double>::quiet_NaN();
  double s = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) s += (pred[i] - y[i]) * (pred[i] - y[i]);
  return std::sqrt(s / static_cast<double>(y.size()));
}

class Evaluator {
 public:
  Evaluator(const Dataset& train, const std::vector<std::string>& vars,
            const std::vector<ShapeConstraint>& constraints)
      : cols_(columns_of(train, vars)), constraints_(constraints) {}

  void evaluate(Individual& ind) const {
    std::vector<double> out(cols_.rows);
    ind.tree.eval_rows(cols_.spans, out);
    ind.feasible = false;
    ind.train_rmse = kInf;
    if (!std::all_of(out.begin(), out.end(), [](double v) { return std::isfinite(v); })) return;
    const auto [a, b] = affine_scaling(out, cols_.target);
    ind.intercept = a;
    ind.slope = b;
    for (double& v : out) v = a + b * v;
    const double e = rmse(out, cols_.target);
    if (!std::isfinite(e)) return;
    ind.train_rmse = e;
    ind.feasible = check_constraints(ScaledTree{ind.tree, a, b}, constraints_).feasible;
  }

 private:
  Columns cols_;
  const std::vector<ShapeConstraint>& constraints_;
};

void evaluate_all(const Evaluator& ev, std::vector<Individual>& pop, std::size_t from,
                  int threads) {
  const std::size_t n = pop.size() - from;
  const auto workers = static_cast<std::size_t>(std::max(1, threads));
  if (workers == 1 || n < 2) {
    for (std::size_t i = from; i < pop.size(); ++i) ev.evaluate(pop[i]);
  } else {
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        for (std::size_t i = from + w; i < pop.size(); i += workers) ev.evaluate(pop[i]);
      });
    }
    for (auto& t : pool) t.join();
  }
  double worst = -kInf;
  for (const auto& ind : pop) {
    if (ind.feasible) worst = std::max(worst, ind.train_rmse);
  }
  if (worst == -kInf) worst = kInf;
  for (auto& ind : pop) ind.fitness = ind.feasible ? ind.train_rmse : worst;
}

// Lower fitness first; a feasible individual beats an infeasible one at equal fitness.
bool better(const Individual& a, const Individual& b) {
  if (a.fitness != b.fitness) return a.fitness < b.fitness;
  return a.feasible && !b.feasible;
}

class Breeder {
 public:
  Breeder(const GAConfig& config, Schema schema)
      : config_(config), schema_(std::move(schema)), rng_(config.seed) {}

  std::mt19937_64& rng() { return rng_; }

  const Individual& tournament(const std::vector<Individual>& pop) {
    fitness_.resize(pop.size());
    for (std::size_t i = 0; i < pop.size(); ++i) fitness_[i] = pop[i].fitness;
    return pop[tournament_select(fitness_, config_.tournament_size, rng_)];
  }

  ExprTree crossover(const ExprTree& a, const ExprTree& b) {
    std::uniform_int_distribution<std::size_t> pa(0, a.size() - 1);
    std::uniform_int_distribution<std::size_t> pb(0, b.size() - 1);
    const std::size_t i = pa(rng_);
    const std::size_t j = pb(rng_);
    return a.replace(i, b.subtree(j));
  }

  ExprTree mutate(const ExprTree& t) {
    std::uniform_int_distribution<std::size_t> pick(0, t.size() - 1);
    const std::size_t i = pick(rng_);
    if (std::uniform_real_distribution<double>(0.0, 1.0)(rng_) < 0.5) {
      return t.replace(i, random_tree(rng_, schema_, 3, false));
    }
    std::vector<Node> nodes = t.nodes();
    Node& n = nodes[i];
    switch (n.op) {
      case Op::constant:
        n.value += std::normal_distribution<double>(0.0, 0.1)(rng_);
        break;
      case Op::variable:
        n.var = std::uniform_int_distribution<int>(0, static_cast<int>(schema_->size()) - 1)(rng_);
        break;
      case Op::neg:
        break;
      default: {
        static constexpr Op kBinary[] = {Op::add, Op::sub, Op::mul, Op::div};
        n.op = kBinary[std::uniform_int_distribution<int>(0, 3)(rng_)];
        break;
      }
    }
    return {schema_, std::move(nodes)};
  }

  std::vector<ExprTree> initial_population() {
    std::vector<ExprTree> pop;
    const int lo = config_.init_min_depth;
    const int hi = std::max(lo, config_.init_max_depth);
    for (int i = 0; static_cast<int>(pop.size()) < config_.population; ++i) {
      int depth = lo + i % (hi - lo + 1);
      const bool full = (i / (hi - lo + 1)) % 2 == 0;
      ExprTree t = random_tree(rng_, schema_, depth, full);
      while (static_cast<int>(t.size()) > config_.max_size) {
        depth = std::max(1, depth - 1);
        t = random_tree(rng_, schema_, depth, false);
      }
      pop.push_back(std::move(t));
    }
    return pop;
  }

 private:
  const GAConfig& config_;
  Schema schema_;
  std::mt19937_64 rng_;
  std::vector<double> fitness_;
};

GenerationRecord record(int generation, const std::vector<Individual>& pop,
                        const Dataset& test) {
  GenerationRecord r;
  r.generation = generation;
  const Individual* best = nullptr;
  std::size_t feasible = 0;
  for (const auto& ind : pop) {
    if (!ind.feasible) continue;
    ++feasible;
    if (!best || ind.train_rmse < best->train_rmse) best = &ind;
  }
  r.feasible_fraction = static_cast<double>(feasible) / static_cast<double>(pop.size());
  r.best_train_rmse = kInf;
  r.best_test_rmse = kInf;
  if (best) {
    ScaledTree model{best->tree, best->intercept, best->slope};
    r.best_train_rmse = best->train_rmse;
    if (test.rows() > 0) {
      const auto pred = predict_tree(model, test);
      r.best_test_rmse = rmse(pred, test.target_values());
      if (!std::isfinite(r.best_test_rmse)) r.best_test_rmse = kInf;
    }
    r.best = std::move(model);
  }
  return r;
}

}  // namespace

void GAConfig::validate() const {
  if (population < 2) throw ConfigError("population must be at least 2");
  if (max_generations < 0) throw ConfigError("max_generations must be non-negative");
  if (tournament_size < 1) throw ConfigError("tournament_size must be at least 1");
  if (!(crossover_prob >= 0.0 && crossover_prob <= 1.0)) throw ConfigError("crossover_prob must lie in [0, 1]");
  if (!(mutation_prob >= 0.0 && mutation_prob <= 1.0)) throw ConfigError("mutation_prob must lie in [0, 1]");
  if (max_size < 1) throw ConfigError("max_size must be at least 1");
  if (elitism < 0 || elitism > population) throw ConfigError("elitism must lie in [0, population]");
  if (init_min_depth < 1 || init_max_depth < init_min_depth) throw ConfigError("bad initial depth range");
}

std::pair<double, double> affine_scaling(std::span<const double> outputs,
                                         std::span<const double> target) {
  const auto n = static_cast<double>(outputs.size());
  if (outputs.empty()) return {0.0, 0.0};
  const double mf = std::accumulate(outputs.begin(), outputs.end(), 0.0) / n;
  const double my = std::accumulate(target.begin(), target.end(), 0.0) / n;
  double sff = 0.0, sfy = 0.0;
  for (std::size_t i = 0; i < outputs.size(); ++i) {
    sff += (outputs[i] - mf) * (outputs[i] - mf);
    sfy += (outputs[i] - mf) * (target[i] - my);
  }
  if (!(sff > 1e-12 * n * std::max(1.0, mf * mf))) return {my, 0.0};
  const double b = sfy / sff;
  return {my - b * mf, b};
}

std::vector<double> predict_tree(const ScaledTree& model, const Dataset& data) {
  std::vector<std::span<const double>> cols;
  for (const auto& v : model.tree.variables()) cols.push_back(data.column(v));
  std::vector<double> out(data.rows());
  model.tree.eval_rows(cols, out);
  for (double& v : out) v = model.intercept + model.slope * v;
  return out;
}

std::vector<GenerationRecord> evolve(const Dataset& train, const Dataset& test,
                                     const GAConfig& config,
                                     const std::vector<ShapeConstraint>& constraints,
                                     const std::optional<std::vector<ExprTree>>& initial) {
  config.validate();
  if (train.rows() == 0) throw SchemaError("training data is empty");
  const auto vars = train.feature_names();
  if (vars.empty()) throw SchemaError("training data has no input columns");
  const Schema schema = make_schema(vars);
  const Evaluator evaluator(train, vars, constraints);
  Breeder breeder(config, schema);

  std::vector<Individual> pop;
  for (auto& t : initial ? *initial : breeder.initial_population()) {
    if (*t.schema() != vars) throw SchemaError("initial tree schema does not match the data");
    pop.push_back({ExprTree(schema, t.nodes())});
  }
  if (pop.size() < 2) throw ConfigError("population must be at least 2");
  evaluate_all(evaluator, pop, 0, config.threads);

  std::vector<GenerationRecord> history;
  history.push_back(record(0, pop, test));
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  for (int g = 1; g <= config.max_generations; ++g) {
    std::vector<std::size_t> order(pop.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return better(pop[a], pop[b]); });
    std::vector<Individual> next;
    next.reserve(pop.size());
    for (int e = 0; e < config.elitism; ++e) next.push_back(pop[order[static_cast<std::size_t>(e)]]);
    const std::size_t elites = next.size();
    while (next.size() < pop.size()) {
      const Individual& p1 = breeder.tournament(pop);
      ExprTree child = p1.tree;
      if (u01(breeder.rng()) < config.crossover_prob) {
        const Individual& p2 = breeder.tournament(pop);
        child = breeder.crossover(p1.tree, p2.tree);
      }
      if (u01(breeder.rng()) < config.mutation_prob) child = breeder.mutate(child);
      if (static_cast<int>(child.size()) > config.max_size) child = p1.tree;
      next.push_back({std::move(child)});
    }
    pop = std::move(next);
    evaluate_all(evaluator, pop, elites, config.threads);
    history.push_back(record(g, pop, test));
  }
  return history;
}

std::size_t tournament_select(std::span<const double> fitness, int size, std::mt19937_64& rng) {
  std::uniform_int_distribution<std::size_t> pick(0, fitness.size() - 1);
  std::size_t winner = pick(rng);
  for (int k = 1; k < size; ++k) {
    const std::size_t c = pick(rng);
    if (fitness[c] < fitness[winner]) winner = c;
  }
  return winner;
}

std::size_t select_stopping_generation(const std::vector<GenerationRecord>& history) {
  if (history.empty()) throw ConfigError("empty generation history");
  std::size_t best = 0;
  for (std::size_t i = 1; i < history.size(); ++i) {
    if (history[i].best_test_rmse < history[best].best_test_rmse) best = i;
  }
  return best;
}

std::string scaled_infix(const ScaledTree& model) {
  return format_double(model.intercept) + " + " + format_double(model.slope) + " * " +
         model.tree.to_infix();
}

std::string scaled_to_json(const ScaledTree& model) {
  nlohmann::json j;
  j["variables"] = model.tree.variables();
  j["intercept"] = model.intercept;
  j["slope"] = model.slope;
  j["infix"] = scaled_infix(model);
  j["tree"] = nlohmann::json::parse(model.tree.to_json());
  return j.dump();
}

ScaledTree scaled_from_json(const std::string& text) {
  try {
    const auto j = nlohmann::json::parse(text);
    const Schema schema = make_schema(j.at("variables").get<std::vector<std::string>>());
    return {ExprTree::from_json(j.at("tree").dump(), schema), j.at("intercept").get<double>(),
            j.at("slope").get<double>()};
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError(std::string("model JSON: ") + e.what());
  }
}

std::string history_to_csv(const std::vector<GenerationRecord>& history) {
  std::ostringstream out;
  out << "generation,train_rmse,test_rmse,feasible_fraction\n";
  for (const auto& r : history) {
    out << r.generation << ',' << format_double(r.best_train_rmse) << ','
        << format_double(r.best_test_rmse) << ',' << format_double(r.feasible_fraction) << '\n';
  }
  return out.str();
}

}  // namespace shapeguard
