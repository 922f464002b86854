#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "shapeguard/validation.hpp"

namespace shapeguard {

namespace exit_code {
inline constexpr int ok = 0;
inline constexpr int error = 1;
inline constexpr int usage = 2;
inline constexpr int invalid = 3;
}  // namespace exit_code

/// Applies a JSON run-config document on top of `config`. Recognised keys:
/// algorithm, scpr, ga, gbt, validation {threshold, controlled}, and the
/// top-level shortcuts solver_tol, cert_grid, cert_tol. Unknown keys throw
/// ConfigError.
void apply_run_config(const nlohmann::json& doc, ValidationConfig& config);

/// Entry point of the command-line tool; `args` excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace shapeguard
