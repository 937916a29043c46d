#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "dcollapse/scenario_config.hpp"
#include <json.hpp>

namespace dcollapse {

/// Names accepted by preset().
std::vector<std::string> preset_names();

/// Worked-example objects with the shared default environment:
///   "tpp"          tetraphenylporphyrin, 1.7e-23 kg, diameter 5e-9 m,
///                  delocalized over 100 diameters;
///   "sugar_grain"  1e-7 kg, diameter 0.5e-3 m, prepared at the 5e-11 m
///                  minimum radius.
/// Environment (not physical data): 1e6 collisions/s, width 5e-11 m, no
/// jitter, head-on impacts. Throws ConfigError listing the available names.
ScenarioConfig preset(std::string_view name);

/// Parses a flat JSON object whose keys carry units (mass_kg, duration_s, ...).
/// Unknown keys, type errors, and invariant violations are all collected into
/// one ConfigError; syntax errors report line and column.
ScenarioConfig parse_config(std::string_view text);

/// Inverse of parse_config.
nlohmann::json config_to_json(const ScenarioConfig& config);

OutputFormat parse_output_format(std::string_view text);
const char* to_string(OutputFormat format);

}  // namespace dcollapse
