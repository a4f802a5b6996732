#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "aoi/simulator.hpp"

namespace aoisim {

// Scenario files are JSON with a versioned schema (see README). Parsing is
// strict about types; semantic checks come from validate_scenario.
inline constexpr int kConfigSchemaVersion = 1;

// Parses without validating. Throws ConfigError on malformed JSON, unknown
// keys, or wrong types.
Scenario parse_scenario(const std::string& json_text);

// Parse plus validate; collects both parse and invariant diagnostics.
std::vector<std::string> lint_scenario(const std::string& json_text);

// Loads, validates, and throws ConfigError with field-level messages when the
// file is not runnable.
Scenario load_scenario(const std::string& path);

std::string scenario_to_json(const Scenario& scenario);

}  // namespace aoisim
