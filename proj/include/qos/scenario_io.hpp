#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>

#include <json.hpp>

#include "qos/model.hpp"

namespace qos {

// Malformed JSON (message carries line and column) or a structurally bad
// document (message carries the JSON path of the offending field).
class ScenarioParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

nlohmann::json scenario_to_json(const ScenarioSpec& spec);
ScenarioSpec scenario_from_json(const nlohmann::json& doc);

std::string dump_scenario(const ScenarioSpec& spec);
ScenarioSpec parse_scenario(std::string_view text);

// Parses only; call validate_scenario() for the semantic checks.
ScenarioSpec load_scenario(const std::filesystem::path& path);
void save_scenario(const ScenarioSpec& spec, const std::filesystem::path& path);

}  // namespace qos
