#pragma once
#include <string>

#include "vil2c/sim.hpp"
#include "vil2c/trainer.hpp"

namespace vil2c::config {

struct ScenarioConfig {
    sim::SimConfig sim;
    train::TrainConfig train;
    bool entropy_grid = false;  // threshold selected by sweep
    uint64_t seed = 1;
};

// JSON config with nested sections; unknown keys are rejected and module
// invariants enforced at load.
ScenarioConfig parse_config(const std::string& json_text);
ScenarioConfig load_config(const std::string& path);
std::string default_config_json();

// Canonical serialized form used for the run manifest hash.
std::string canonical_json(const ScenarioConfig& cfg);
uint64_t config_hash(const ScenarioConfig& cfg);
std::string manifest_json(const ScenarioConfig& cfg, uint64_t seed);

inline constexpr const char* kCodeVersion = "vil2c 1.0";

}  // namespace vil2c::config
