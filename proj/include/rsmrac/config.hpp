#pragma once

#include <string>

#include <json.hpp>

#include "rsmrac/sim.hpp"

namespace rsm {

struct ConfigError : ModelError {
    using ModelError::ModelError;
};

// Sections: seed, plant, reference, adaptation, barrier, budget, filter,
// policy, initial, sim, expect. Missing keys keep their defaults, unknown
// keys are rejected. Budget entries accept "auto".
ScenarioConfig config_from_json(const nlohmann::json& j);
nlohmann::json config_to_json(const ScenarioConfig& cfg);

ScenarioConfig load_config(const std::string& path);   // throws ConfigError
void validate_config(const ScenarioConfig& cfg);        // throws ConfigError naming the key

// FNV-1a 64 over the canonical dump, as 16 hex digits.
std::string config_fingerprint(const ScenarioConfig& cfg);

}  // namespace rsm
