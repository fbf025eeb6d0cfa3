#pragma once

// JSON (de)serialization of scenarios, flywheel specs and sweep specs.
// Readers are strict: unknown keys and wrong types are ConfigErrors that
// name the offending field by its dotted path.

#include <filesystem>
#include <string>

#include <json.hpp>

#include "rbs/experiments.hpp"
#include "rbs/scenario.hpp"

namespace rbs::io {

nlohmann::json to_json(const FlywheelSpec& spec);
nlohmann::json to_json(const drivetrain::ProfileSpec& profile);
nlohmann::json to_json(const Scenario& scenario);
nlohmann::json to_json(const experiments::SweepSpec& spec);

FlywheelSpec flywheel_from_json(const nlohmann::json& j, const std::string& where = "flywheel");
Scenario scenario_from_json(const nlohmann::json& j);
experiments::SweepSpec sweep_from_json(const nlohmann::json& j);

// Parse errors carry line and column from the JSON parser.
nlohmann::json read_json(const std::filesystem::path& path);
void write_json(const std::filesystem::path& path, const nlohmann::json& j);

Scenario read_scenario(const std::filesystem::path& path);
void write_scenario(const std::filesystem::path& path, const Scenario& scenario);

// "path=value" override applied through experiments::set_parameter.
void apply_override(Scenario& scenario, const std::string& assignment);

}  // namespace rbs::io
