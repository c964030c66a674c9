#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "modnet/simulator.hpp"

namespace modnet {

using Json = nlohmann::ordered_json;

/// Parses a JSON configuration document, fills documented defaults and
/// validates every invariant. Errors are ConfigError and carry a line number
/// (syntax), the field path (invariants) or a spelling suggestion (unknown keys).
EpisodeConfig parse_config(std::string_view text);

EpisodeConfig config_from_json(const Json& doc);

/// Fully resolved document; parse_config(serialize_config(c)) == c.
Json config_to_json(const EpisodeConfig& config);
std::string serialize_config(const EpisodeConfig& config);

/// Returns a copy of `config` with the dotted field `path` (for example
/// "policy.epsilon") set to `value`, re-validated.
EpisodeConfig with_parameter(const EpisodeConfig& config, std::string_view path, const Json& value);

struct BuiltinScenario {
  std::string name;
  std::string description;
  Json scenario;  // a scenario section
};

const std::vector<BuiltinScenario>& builtin_scenarios();
/// ConfigError for an unknown name.
const BuiltinScenario& builtin_scenario(std::string_view name);

/// Closest candidate by edit distance, or empty if nothing is close.
std::string suggest(std::string_view word, const std::vector<std::string>& candidates);

}  // namespace modnet
