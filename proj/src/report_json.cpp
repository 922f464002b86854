#include "shapeguard/report_json.hpp"

#include <cmath>

namespace shapeguard {

namespace {

using nlohmann::json;

// Non-finite numbers become null so every report stays valid JSON.
json number(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json numbers(const std::vector<double>& v) {
  json out = json::array();
  for (double x : v) out.push_back(number(x));
  return out;
}

}  // namespace

json to_json(const Interval& iv) { return json::array({number(iv.lo()), number(iv.hi())}); }

json to_json(const CertificationReport& report) {
  json cs = json::array();
  for (const auto& c : report.constraints) {
    cs.push_back({{"constraint", c.constraint},
                  {"status", to_string(c.status)},
                  {"enclosure", to_json(c.enclosure)},
                  {"worst_violation", number(c.worst_violation)},
                  {"worst_point", numbers(c.worst_point)},
                  {"boxes_examined", c.boxes_examined}});
  }
  return {{"variables", report.variables},
          {"all_certified", report.all_certified()},
          {"any_violated", report.any_violated()},
          {"constraints", cs}};
}

json to_json(const FitReport& report) {
  json j = {{"train_rmse", number(report.train_rmse)},
            {"objective_value", number(report.objective_value)},
            {"iterations", report.iterations},
            {"max_sampled_violation", number(report.max_sampled_violation)},
            {"constraint_rows", report.constraint_rows},
            {"grid_points_per_dim", report.grid_points_per_dim},
            {"refinement_rounds", report.refinement_rounds},
            {"phase_one", report.phase_one}};
  j["certification"] = report.certification ? to_json(*report.certification) : json(nullptr);
  return j;
}

json to_json(const GenerationRecord& record) {
  return {{"generation", record.generation},
          {"train_rmse", number(record.best_train_rmse)},
          {"test_rmse", number(record.best_test_rmse)},
          {"feasible_fraction", number(record.feasible_fraction)},
          {"best", record.best ? json(scaled_infix(*record.best)) : json(nullptr)}};
}

json to_json(const ValidationReport& report) {
  json segs = json::array();
  for (std::size_t i = 0; i < report.segments.size(); ++i) {
    const auto& s = report.segments[i];
    segs.push_back({{"start", s.start},
                    {"end", s.end},
                    {"rmse", i < report.segment_rmse.size() ? number(report.segment_rmse[i]) : json(nullptr)}});
  }
  json j = {{"dataset", report.dataset},
            {"truth", report.truth ? json(to_string(*report.truth)) : json(nullptr)},
            {"score", number(report.score)},
            {"verdict", report.verdict ? json(to_string(*report.verdict)) : json(nullptr)},
            {"segments", segs},
            {"failure", report.failure.empty() ? json(nullptr) : json(report.failure)}};
  if (report.error_annotation) {
    j["error_annotation"] = {{"kind", report.error_annotation->kind},
                             {"start", report.error_annotation->start},
                             {"end", report.error_annotation->end}};
  } else {
    j["error_annotation"] = nullptr;
  }
  j["fit"] = report.fit ? to_json(*report.fit) : json(nullptr);
  if (report.tree_check) {
    json enc = json::array();
    for (const auto& e : report.tree_check->enclosures) enc.push_back(to_json(e));
    j["tree_check"] = {{"feasible", report.tree_check->feasible}, {"enclosures", enc}};
  } else {
    j["tree_check"] = nullptr;
  }
  j["model"] = report.model_json.empty() ? json(nullptr) : json::parse(report.model_json);
  return j;
}

json to_json(const RocCurve& curve) {
  json pts = json::array();
  for (std::size_t i = 0; i < curve.points.size(); ++i) {
    const double t = curve.thresholds[i];
    pts.push_back({{"threshold", std::isfinite(t) ? json(t) : json(t > 0 ? "inf" : "-inf")},
                   {"fpr", curve.points[i].first},
                   {"tpr", curve.points[i].second}});
  }
  return {{"auc", curve.auc}, {"points", pts}};
}

json to_json(const CorpusReport& report) {
  json reports = json::array();
  for (const auto& r : report.reports) reports.push_back(to_json(r));
  const auto& c = report.confusion;
  return {{"datasets", reports},
          {"confusion",
           {{"true_positive", c.true_positive},
            {"false_positive", c.false_positive},
            {"true_negative", c.true_negative},
            {"false_negative", c.false_negative},
            {"unlabeled", c.unlabeled},
            {"failed", c.failed}}},
          {"roc", report.roc ? to_json(*report.roc) : json(nullptr)}};
}

json to_json(const ModelConfig& config) {
  const auto& s = config.scpr;
  const auto& g = config.ga;
  const auto& b = config.gbt;
  return {{"algorithm", to_string(config.algorithm)},
          {"scpr",
           {{"degree", s.degree},
            {"lambda", s.lambda},
            {"alpha", s.alpha},
            {"grid_points_per_dim", s.grid_points_per_dim}}},
          {"ga",
           {{"population", g.population},
            {"max_generations", g.max_generations},
            {"tournament_size", g.tournament_size},
            {"crossover_prob", g.crossover_prob},
            {"mutation_prob", g.mutation_prob},
            {"max_size", g.max_size},
            {"seed", g.seed},
            {"elitism", g.elitism}}},
          {"gbt",
           {{"n_trees", b.n_trees},
            {"learning_rate", b.learning_rate},
            {"max_depth", b.max_depth},
            {"lambda", b.lambda},
            {"alpha", b.alpha},
            {"min_samples_leaf", b.min_samples_leaf},
            {"monotone", b.monotone},
            {"seed", b.seed}}}};
}

json to_json(const GridSearchResult& result) {
  json cells = json::array();
  for (const auto& c : result.cells) {
    cells.push_back({{"degree", c.degree},
                     {"lambda", c.lambda},
                     {"alpha", c.alpha},
                     {"score", number(c.score)},
                     {"fits", c.fits},
                     {"failures", c.failures},
                     {"failed", c.failed},
                     {"stopping_generation", c.stopping_generation}});
  }
  return {{"best_index", result.best},
          {"best", to_json(result.cells[result.best].config)},
          {"cells", cells}};
}

std::string envelope(const std::string& command, const nlohmann::json& report,
                     double wall_time_seconds) {
  const json j = {{"command", command},
                  {"report", report},
                  {"metadata", {{"tool", "shapeguard"}, {"wall_time_seconds", wall_time_seconds}}}};
  return j.dump(2) + "\n";
}

}  // namespace shapeguard
