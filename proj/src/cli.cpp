#include "shapeguard/cli.hpp"

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <set>
#include <sstream>

#include <CLI11.hpp>

#include "shapeguard/error.hpp"
#include "shapeguard/report_json.hpp"
#include "shapeguard/synth.hpp"

namespace shapeguard {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct UsageError : Error {
  using Error::Error;
};

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open '" + path.string() + "'");
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

void write_file(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write '" + path.string() + "'");
  out << text;
}

template <class T>
void take(const json& block, const char* key, T& field, std::set<std::string>& seen) {
  if (!block.contains(key)) return;
  seen.insert(key);
  try {
    field = block.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config key '") + key + "': " + e.what());
  }
}

void reject_unknown(const json& block, const std::set<std::string>& seen, const std::string& where) {
  if (!block.is_object()) throw ConfigError("config block '" + where + "' must be an object");
  for (const auto& [key, value] : block.items()) {
    if (!seen.count(key)) throw ConfigError("unknown config key '" + where + key + "'");
  }
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream s(text);
  for (std::string item; std::getline(s, item, ',');) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

// Header names of a CSV file, for choosing a default target.
std::vector<std::string> csv_header(const std::string& text) {
  const auto eol = text.find('\n');
  std::string line = text.substr(0, eol);
  if (!line.empty() && line.back() == '\r') line.pop_back();
  return split_list(line);
}

struct Common {
  std::string data;
  std::string constraints;
  std::string algo;
  std::optional<double> t;
  std::optional<std::uint64_t> seed;
  std::string config;
  std::string out;
  std::optional<int> threads;
  std::string target;
  std::string controlled;
  std::string corpus;
  std::string csv;
};

struct Context {
  ValidationConfig config;
  std::optional<ConstraintSpec> spec;
  int threads = 1;
};

Context make_context(const Common& c) {
  Context ctx;
  if (!c.config.empty()) {
    json doc;
    try {
      doc = json::parse(read_file(c.config));
    } catch (const json::exception& e) {
      throw ConfigError("config file: " + std::string(e.what()));
    }
    apply_run_config(doc, ctx.config);
  }
  if (!c.algo.empty()) ctx.config.model.algorithm = parse_algorithm(c.algo);
  if (c.t) ctx.config.threshold = *c.t;
  if (c.seed) {
    ctx.config.model.ga.seed = *c.seed;
    ctx.config.model.gbt.seed = *c.seed;
  }
  if (!c.controlled.empty()) ctx.config.controlled = split_list(c.controlled);
  ctx.threads = c.threads ? *c.threads : default_threads();
  if (ctx.threads < 1) throw ConfigError("--threads must be at least 1");
  ctx.config.threads = ctx.threads;
  if (!c.constraints.empty()) ctx.spec = load_constraints(c.constraints);
  return ctx;
}

std::vector<ShapeConstraint> constraints_of(const Context& ctx) {
  return ctx.spec ? ctx.spec->constraints : std::vector<ShapeConstraint>{};
}

std::string resolve_target(const Common& c, const Context& ctx, const std::string& csv_text) {
  if (!c.target.empty()) return c.target;
  if (ctx.spec && !ctx.spec->target.empty()) return ctx.spec->target;
  const auto header = csv_header(csv_text);
  if (header.empty()) throw SchemaError("CSV has no header row");
  return header.back();
}

Dataset load_data(const std::string& path, const Common& c, const Context& ctx) {
  const std::string text = read_file(path);
  return parse_csv(text, fs::path(path).stem().string(), resolve_target(c, ctx, text));
}

// manifest.csv: file,label,kind,start,end
std::vector<Dataset> load_corpus(const fs::path& dir, const Common& c, const Context& ctx) {
  const std::string manifest = read_file(dir / "manifest.csv");
  std::stringstream lines(manifest);
  std::string line;
  std::getline(lines, line);
  std::vector<Dataset> out;
  while (std::getline(lines, line)) {
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::stringstream s(line);
    for (std::string item; std::getline(s, item, ',');) f.push_back(item);
    while (f.size() < 5) f.emplace_back();
    Dataset d = load_data((dir / f[0]).string(), c, ctx);
    if (!f[1].empty()) d.label = parse_label(f[1]);
    if (!f[2].empty()) {
      d.error = ErrorAnnotation{f[2], static_cast<std::size_t>(std::stoull(f[3])),
                                static_cast<std::size_t>(std::stoull(f[4]))};
    }
    out.push_back(std::move(d));
  }
  if (out.empty()) throw SchemaError("corpus manifest lists no datasets");
  return out;
}

std::string error_kind(const std::exception& e) {
  if (dynamic_cast<const SchemaError*>(&e)) return "SchemaError";
  if (dynamic_cast<const DataError*>(&e)) return "DataError";
  if (dynamic_cast<const ParseError*>(&e)) return "ParseError";
  if (dynamic_cast<const ConfigError*>(&e)) return "ConfigError";
  if (dynamic_cast<const InfeasibleError*>(&e)) return "InfeasibleError";
  if (dynamic_cast<const SolverError*>(&e)) return "SolverError";
  if (dynamic_cast<const BudgetError*>(&e)) return "BudgetError";
  if (dynamic_cast<const GridError*>(&e)) return "GridError";
  if (dynamic_cast<const DegenerateError*>(&e)) return "DegenerateError";
  if (dynamic_cast<const ArityError*>(&e)) return "ArityError";
  if (dynamic_cast<const DomainError*>(&e)) return "DomainError";
  return "error";
}

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

void emit(const Common& c, const std::string& command, const json& report,
          std::chrono::steady_clock::time_point start) {
  if (!c.out.empty()) write_file(c.out, envelope(command, report, seconds_since(start)));
}

json scaling_json(const ScalingRecord& record) {
  json out = json::array();
  for (const auto& s : record.columns) {
    out.push_back({{"column", s.column}, {"min", s.min}, {"max", s.max}, {"constant", s.constant}});
  }
  return out;
}

int cmd_fit(const Common& c, std::ostream& out) {
  const auto start = std::chrono::steady_clock::now();
  if (c.data.empty()) throw UsageError("fit needs --data");
  const Context ctx = make_context(c);
  const Dataset raw = load_data(c.data, c, ctx);
  auto [data, record] = scale_unit(raw, raw.column_names());
  const auto constraints = constraints_of(ctx);
  const TrainedModel m = train_model(ctx.config.model, data, constraints);
  json report = {{"dataset", raw.name()},
                 {"algorithm", to_string(m.algorithm)},
                 {"target", raw.target()},
                 {"scaling", scaling_json(record)},
                 {"model", json::parse(m.model_json())},
                 {"fit", m.fit ? to_json(*m.fit) : json(nullptr)}};
  json history = json::array();
  for (const auto& h : m.history) history.push_back(to_json(h));
  report["history"] = history;
  const auto pred = m.predict(data);
  double sse = 0.0;
  const auto y = data.target_values();
  for (std::size_t i = 0; i < pred.size(); ++i) sse += (pred[i] - y[i]) * (pred[i] - y[i]);
  const double train_rmse = std::sqrt(sse / static_cast<double>(pred.size()));
  report["train_rmse"] = train_rmse;
  emit(c, "fit", report, start);
  if (!c.csv.empty() && !m.history.empty()) write_file(c.csv, history_to_csv(m.history));
  out << to_string(m.algorithm) << " fit on " << raw.name() << " (" << raw.rows()
      << " rows): train RMSE " << format_double(train_rmse) << "\n";
  if (m.fit && m.fit->certification) {
    for (const auto& cert : m.fit->certification->constraints) {
      out << "  " << to_string(cert.status) << "  " << cert.constraint << "\n";
    }
  }
  return exit_code::ok;
}

int cmd_certify(const Common& c, const std::string& model_path, std::ostream& out) {
  const auto start = std::chrono::steady_clock::now();
  if (model_path.empty() || c.constraints.empty()) {
    throw UsageError("certify needs --model and --constraints");
  }
  const Context ctx = make_context(c);
  json doc;
  try {
    doc = json::parse(read_file(model_path));
  } catch (const json::exception& e) {
    throw SchemaError("model file: " + std::string(e.what()));
  }
  // Accept a bare model or a fit report envelope.
  if (doc.contains("report")) doc = doc.at("report").at("model");
  const PolyModel model = poly_from_json(doc.dump());
  CertifyOptions opts;
  opts.grid = ctx.config.model.scpr.cert_grid;
  opts.tol = ctx.config.model.scpr.cert_tol;
  opts.max_points = ctx.config.model.scpr.cert_max_points;
  opts.max_boxes = ctx.config.model.scpr.cert_max_boxes;
  const CertificationReport cert = certify(model, ctx.spec->constraints, opts);
  emit(c, "certify", to_json(cert), start);
  for (const auto& k : cert.constraints) out << to_string(k.status) << "  " << k.constraint << "\n";
  return cert.all_certified() ? exit_code::ok : exit_code::invalid;
}

int cmd_validate(const Common& c, std::ostream& out) {
  const auto start = std::chrono::steady_clock::now();
  if (c.data.empty() == c.corpus.empty()) throw UsageError("validate needs exactly one of --data or --corpus");
  const Context ctx = make_context(c);
  const auto constraints = constraints_of(ctx);
  if (!c.data.empty()) {
    const Dataset data = load_data(c.data, c, ctx);
    const ValidationReport r = validate_dataset(data, ctx.config, constraints);
    json report = to_json(r);
    report["threshold"] = ctx.config.threshold;
    report["config"] = to_json(ctx.config.model);
    emit(c, "validate", report, start);
    out << r.dataset << ": score " << format_double(r.score) << " t " << format_double(ctx.config.threshold)
        << " -> " << to_string(*r.verdict) << "\n";
    return *r.verdict == Label::invalid ? exit_code::invalid : exit_code::ok;
  }
  const auto corpus = load_corpus(c.corpus, c, ctx);
  const CorpusReport r = validate_corpus(corpus, ctx.config, constraints);
  json report = to_json(r);
  report["threshold"] = ctx.config.threshold;
  report["config"] = to_json(ctx.config.model);
  emit(c, "validate", report, start);
  bool any_invalid = false;
  for (const auto& v : r.reports) {
    if (!v.failure.empty()) {
      out << v.dataset << ": failed: " << v.failure << "\n";
      continue;
    }
    any_invalid = any_invalid || *v.verdict == Label::invalid;
    out << v.dataset << ": score " << format_double(v.score) << " -> " << to_string(*v.verdict) << "\n";
  }
  const auto& k = r.confusion;
  out << "TP " << k.true_positive << " FP " << k.false_positive << " TN " << k.true_negative
      << " FN " << k.false_negative << " failed " << k.failed << "\n";
  if (r.roc) out << "AUC " << format_double(r.roc->auc) << "\n";
  if (k.failed > 0) return exit_code::error;
  return any_invalid ? exit_code::invalid : exit_code::ok;
}

std::vector<ModelConfig> default_grid(const ModelConfig& base) {
  std::vector<ModelConfig> grid;
  switch (base.algorithm) {
    case Algorithm::pr:
    case Algorithm::scpr: return default_scpr_grid(base);
    case Algorithm::gbt:
      for (int depth : {2, 3, 4, 6}) {
        for (double lambda : {0.0, 1.0, 10.0}) {
          ModelConfig c = base;
          c.gbt.max_depth = depth;
          c.gbt.lambda = lambda;
          grid.push_back(c);
        }
      }
      return grid;
    case Algorithm::scsr: return {base};
  }
  return grid;
}

int cmd_gridsearch(const Common& c, const std::vector<std::string>& data_files, std::ostream& out) {
  const auto start = std::chrono::steady_clock::now();
  const Context ctx = make_context(c);
  std::vector<Dataset> datasets;
  if (!c.corpus.empty()) {
    for (auto& d : load_corpus(c.corpus, c, ctx)) {
      if (!d.label || *d.label == Label::valid) datasets.push_back(std::move(d));
    }
  }
  for (const auto& f : data_files) datasets.push_back(load_data(f, c, ctx));
  if (datasets.empty()) throw UsageError("gridsearch needs --corpus or --data");
  const auto grid = default_grid(ctx.config.model);
  const GridSearchResult r = grid_search(datasets, grid, constraints_of(ctx), ctx.threads);
  emit(c, "gridsearch", to_json(r), start);
  if (!c.csv.empty()) write_file(c.csv, grid_to_csv(r));
  const auto& best = r.cells[r.best];
  out << "best of " << r.cells.size() << " cells over " << datasets.size() << " datasets: degree "
      << best.degree << " lambda " << format_double(best.lambda) << " alpha "
      << format_double(best.alpha) << " score " << format_double(best.score) << "\n";
  return exit_code::ok;
}

int cmd_roc(const Common& c, const std::string& scores_path, std::ostream& out) {
  const auto start = std::chrono::steady_clock::now();
  if (c.corpus.empty() == scores_path.empty()) throw UsageError("roc needs exactly one of --corpus or --scores");
  const Context ctx = make_context(c);
  RocCurve curve;
  if (!scores_path.empty()) {
    const Dataset s = parse_csv(read_file(scores_path), "scores", "label");
    std::vector<Label> labels;
    for (double v : s.column("label")) labels.push_back(v != 0.0 ? Label::invalid : Label::valid);
    curve = roc(s.column("score"), labels);
  } else {
    const CorpusReport r = validate_corpus(load_corpus(c.corpus, c, ctx), ctx.config, constraints_of(ctx));
    if (!r.roc) throw DegenerateError("ROC needs both valid and invalid datasets");
    curve = *r.roc;
  }
  emit(c, "roc", to_json(curve), start);
  if (!c.csv.empty()) write_file(c.csv, roc_to_csv(curve));
  out << "AUC " << format_double(curve.auc) << " over " << curve.points.size() << " thresholds\n";
  return exit_code::ok;
}

int cmd_synth(const Common& c, const std::string& kind, int n_valid, int n_invalid, std::ostream& out) {
  const auto start = std::chrono::steady_clock::now();
  const std::uint64_t seed = c.seed.value_or(0);
  const SynthParams params;
  if (!c.corpus.empty()) {
    CorpusOptions opts;
    opts.n_valid = n_valid;
    opts.n_invalid = n_invalid;
    const auto corpus = synth_corpus(seed, params, opts);
    std::error_code ec;
    fs::create_directories(c.corpus, ec);
    if (ec) throw SchemaError("cannot create '" + c.corpus + "': " + ec.message());
    std::string manifest = "file,label,kind,start,end\n";
    json entries = json::array();
    for (const auto& d : corpus) {
      const std::string file = d.name() + ".csv";
      write_csv(d, fs::path(c.corpus) / file);
      manifest += file + "," + to_string(*d.label) + ",";
      if (d.error) {
        manifest += d.error->kind + "," + std::to_string(d.error->start) + "," + std::to_string(d.error->end);
      } else {
        manifest += ",,";
      }
      manifest += "\n";
      entries.push_back({{"file", file}, {"label", to_string(*d.label)}, {"rows", d.rows()},
                         {"error", d.error ? json(d.error->kind) : json(nullptr)}});
    }
    write_file(fs::path(c.corpus) / "manifest.csv", manifest);
    const json report = {{"seed", seed}, {"datasets", entries}};
    if (!c.out.empty()) write_file(c.out, envelope("synth", report, seconds_since(start)));
    out << "wrote " << corpus.size() << " datasets to " << c.corpus << "\n";
    return exit_code::ok;
  }
  if (c.out.empty()) throw UsageError("synth needs --out or --corpus");
  const Dataset d = synth_generate(parse_synth_kind(kind), seed, params);
  write_csv(d, c.out);
  out << "wrote " << d.name() << " (" << d.rows() << " rows, " << to_string(*d.label) << ") to "
      << c.out << "\n";
  return exit_code::ok;
}

}  // namespace

void apply_run_config(const json& doc, ValidationConfig& config) {
  std::set<std::string> top;
  ModelConfig& m = config.model;
  if (doc.contains("algorithm")) {
    top.insert("algorithm");
    m.algorithm = parse_algorithm(doc.at("algorithm").get<std::string>());
  }
  take(doc, "solver_tol", m.scpr.solver_tol, top);
  take(doc, "cert_grid", m.scpr.cert_grid, top);
  take(doc, "cert_tol", m.scpr.cert_tol, top);
  if (doc.contains("scpr")) {
    top.insert("scpr");
    const json& b = doc.at("scpr");
    std::set<std::string> seen;
    auto& s = m.scpr;
    take(b, "degree", s.degree, seen);
    take(b, "lambda", s.lambda, seen);
    take(b, "alpha", s.alpha, seen);
    take(b, "grid_points_per_dim", s.grid_points_per_dim, seen);
    take(b, "solver_tol", s.solver_tol, seen);
    take(b, "max_iter", s.max_iter, seen);
    take(b, "cert_grid", s.cert_grid, seen);
    take(b, "cert_tol", s.cert_tol, seen);
    take(b, "cert_max_points", s.cert_max_points, seen);
    take(b, "cert_max_boxes", s.cert_max_boxes, seen);
    take(b, "refine", s.refine, seen);
    take(b, "refine_rounds", s.refine_rounds, seen);
    reject_unknown(b, seen, "scpr.");
    s.validate();
  }
  if (doc.contains("ga")) {
    top.insert("ga");
    const json& b = doc.at("ga");
    std::set<std::string> seen;
    auto& g = m.ga;
    take(b, "population", g.population, seen);
    take(b, "max_generations", g.max_generations, seen);
    take(b, "tournament_size", g.tournament_size, seen);
    take(b, "crossover_prob", g.crossover_prob, seen);
    take(b, "mutation_prob", g.mutation_prob, seen);
    take(b, "max_size", g.max_size, seen);
    take(b, "seed", g.seed, seen);
    take(b, "elitism", g.elitism, seen);
    take(b, "init_min_depth", g.init_min_depth, seen);
    take(b, "init_max_depth", g.init_max_depth, seen);
    reject_unknown(b, seen, "ga.");
    g.validate();
  }
  if (doc.contains("gbt")) {
    top.insert("gbt");
    const json& b = doc.at("gbt");
    std::set<std::string> seen;
    auto& g = m.gbt;
    take(b, "n_trees", g.n_trees, seen);
    take(b, "learning_rate", g.learning_rate, seen);
    take(b, "max_depth", g.max_depth, seen);
    take(b, "lambda", g.lambda, seen);
    take(b, "alpha", g.alpha, seen);
    take(b, "min_samples_leaf", g.min_samples_leaf, seen);
    take(b, "monotone", g.monotone, seen);
    take(b, "subsample", g.subsample, seen);
    take(b, "seed", g.seed, seen);
    reject_unknown(b, seen, "gbt.");
    g.validate();
  }
  if (doc.contains("validation")) {
    top.insert("validation");
    const json& b = doc.at("validation");
    std::set<std::string> seen;
    take(b, "threshold", config.threshold, seen);
    take(b, "controlled", config.controlled, seen);
    reject_unknown(b, seen, "validation.");
  }
  reject_unknown(doc, top, "");
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"shapeguard: shape-constrained regression for data validation", "shapeguard"};
  app.require_subcommand(1, 1);
  Common c;
  std::string model_path, scores_path, kind = "friction_valid";
  std::vector<std::string> data_files;
  int n_valid = 18, n_invalid = 35;

  auto add_common = [&](CLI::App* sub, bool data, bool algo) {
    if (data) sub->add_option("--data", c.data, "CSV dataset");
    sub->add_option("--constraints", c.constraints, "constraint specification file");
    if (algo) {
      sub->add_option("--algo", c.algo, "pr, scpr, scsr or gbt")
          ->check(CLI::IsMember({"pr", "scpr", "scsr", "gbt"}));
    }
    sub->add_option("--seed", c.seed, "random seed");
    sub->add_option("--config", c.config, "JSON run configuration");
    sub->add_option("--out", c.out, "JSON report path");
    sub->add_option("--threads", c.threads, "worker threads (default: SHAPEGUARD_THREADS or 1)");
    sub->add_option("--target", c.target, "target column (default: spec target, else last column)");
  };

  CLI::App* fit = app.add_subcommand("fit", "fit a model to one dataset");
  add_common(fit, true, true);
  fit->add_option("--csv", c.csv, "scsr generation history CSV");

  CLI::App* cert = app.add_subcommand("certify", "certify a polynomial model against constraints");
  add_common(cert, false, false);
  cert->add_option("--model", model_path, "model JSON (bare or a fit report)");

  CLI::App* val = app.add_subcommand("validate", "classify a dataset or a corpus");
  add_common(val, true, true);
  val->add_option("--t", c.t, "segment RMSE threshold");
  val->add_option("--corpus", c.corpus, "directory with manifest.csv");
  val->add_option("--controlled", c.controlled, "comma-separated controlled columns");

  CLI::App* grid = app.add_subcommand("gridsearch", "two-fold grid search over valid datasets");
  add_common(grid, false, true);
  grid->add_option("--data", data_files, "CSV dataset (repeatable)");
  grid->add_option("--corpus", c.corpus, "directory with manifest.csv");
  grid->add_option("--csv", c.csv, "result table CSV");

  CLI::App* rocc = app.add_subcommand("roc", "ROC curve over a corpus or a score file");
  add_common(rocc, false, true);
  rocc->add_option("--corpus", c.corpus, "directory with manifest.csv");
  rocc->add_option("--scores", scores_path, "CSV with score,label columns (label 1 = invalid)");
  rocc->add_option("--controlled", c.controlled, "comma-separated controlled columns");
  rocc->add_option("--t", c.t, "threshold (unused by the sweep)");
  rocc->add_option("--csv", c.csv, "curve CSV");

  CLI::App* syn = app.add_subcommand("synth", "generate synthetic datasets");
  syn->add_option("--kind", kind, "dataset kind");
  syn->add_option("--seed", c.seed, "random seed");
  syn->add_option("--out", c.out, "CSV path (with --corpus: JSON manifest path)");
  syn->add_option("--corpus", c.corpus, "write the labeled corpus to this directory");
  syn->add_option("--n-valid", n_valid, "corpus valid datasets");
  syn->add_option("--n-invalid", n_invalid, "corpus invalid datasets");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return exit_code::ok;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n" << app.help();
    return exit_code::usage;
  }

  try {
    if (fit->parsed()) return cmd_fit(c, out);
    if (cert->parsed()) return cmd_certify(c, model_path, out);
    if (val->parsed()) return cmd_validate(c, out);
    if (grid->parsed()) return cmd_gridsearch(c, data_files, out);
    if (rocc->parsed()) return cmd_roc(c, scores_path, out);
    if (syn->parsed()) return cmd_synth(c, kind, n_valid, n_invalid, out);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return exit_code::usage;
  } catch (const std::exception& e) {
    err << error_kind(e) << ": " << e.what() << "\n";
    return exit_code::error;
  }
  return exit_code::usage;
}

}  // namespace shapeguard
