#pragma once
#include <cstdint>
#include <string>
#include <vector>

#include "vil2c/channel.hpp"

namespace vil2c::envs {

struct Vec2 {
    double x = 0.0, y = 0.0;
};

enum class EnvKind { PredatorPrey, CooperativeNavigation };

// Discrete action set: stay, up, down, left, right.
inline constexpr int kNumActions = 5;
Vec2 action_direction(int action);

struct EnvConfig {
    EnvKind kind = EnvKind::PredatorPrey;
    int n_agents = 4;
    int n_preys = 2;      // 0 for CN
    int n_landmarks = 2;  // 4 for CN
    double bounds = 2.0;  // arena half-width
    double agent_speed = 1.0;
    double prey_speed = 1.3;
    double collision_radius = 0.15;
    double capture_radius = 0.2;
    double collision_penalty = 1.0;
    double landmark_radius = 0.25;      // PP obstacle radius
    bool landmarks_are_targets = false; // PP reward switch (default: preys only)
    bool evasion_enabled = true;
    std::vector<double> observation_radii = {1.2, 1.6, 2.0, 2.4};

    int entity_count() const { return n_agents + n_preys + n_landmarks; }
    double obs_radius(int agent_id) const {
        return observation_radii[agent_id % observation_radii.size()];
    }
    // env_obs width: self pos+vel, per-peer [vis, relpos, relvel],
    // per-prey the same, per-landmark [vis, relpos].
    int obs_width() const {
        return 4 + 5 * (n_agents - 1) + 5 * n_preys + 3 * n_landmarks;
    }
    int state_width() const { return 4 * (n_agents + n_preys) + 2 * n_landmarks; }
};

struct WorldState {
    std::vector<Vec2> positions;   // agents, then preys, then landmarks
    std::vector<Vec2> velocities;  // agents and preys; landmarks static
    double bounds = 2.0;
};

struct AgentObservation {
    std::vector<double> env_obs;
    std::vector<double> channel_obs;  // per-peer path loss, dB
};

struct StepResult {
    WorldState state;
    double reward = 0.0;
    double success = 0.0;  // CN: fraction of covered landmarks
};

struct ChannelConstants {
    double path_loss_exponent = 2.0;
    double path_loss_offset = 45.0;
    double noise_density = 1e-9;
};

class Env {
public:
    explicit Env(EnvConfig config);

    WorldState reset(uint64_t seed) const;
    // displacements: one Vec2 per learning agent, already time-blended by
    // the simulator; dt scales the scripted prey motion.
    StepResult step(const WorldState& state,
                    const std::vector<Vec2>& displacements, double dt) const;
    AgentObservation observe(const WorldState& state, int agent_id,
                             const ChannelConstants& ch) const;
    // Flat global state for the centralized critic.
    std::vector<double> global_state(const WorldState& state) const;
    double distance(const WorldState& state, int a, int b) const;

    const EnvConfig& config() const { return cfg_; }

private:
    EnvConfig cfg_;
};

EnvConfig default_pp_config();
EnvConfig default_cn_config();

}  // namespace vil2c::envs
