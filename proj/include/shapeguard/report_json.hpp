#pragma once

#include <string>

#include <json.hpp>

#include "shapeguard/scpr.hpp"
#include "shapeguard/scsr.hpp"
#include "shapeguard/validation.hpp"

namespace shapeguard {

// Wall-clock times are left out of every report so identical inputs give
// identical bytes; they belong in the envelope metadata.

nlohmann::json to_json(const Interval& iv);
nlohmann::json to_json(const CertificationReport& report);
nlohmann::json to_json(const FitReport& report);
nlohmann::json to_json(const GenerationRecord& record);
nlohmann::json to_json(const ValidationReport& report);
nlohmann::json to_json(const CorpusReport& report);
nlohmann::json to_json(const RocCurve& curve);
nlohmann::json to_json(const GridSearchResult& result);
nlohmann::json to_json(const ModelConfig& config);

/// {"command", "report", "metadata": {"tool", "wall_time_seconds"}}, pretty-printed.
std::string envelope(const std::string& command, const nlohmann::json& report,
                     double wall_time_seconds);

}  // namespace shapeguard
