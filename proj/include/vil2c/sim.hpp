#pragma once
#include <cstdint>
#include <string>
#include <vector>

#include "vil2c/agent.hpp"
#include "vil2c/allocator.hpp"
#include "vil2c/env.hpp"
#include "vil2c/nets.hpp"

namespace vil2c::sim {

enum class Mode { Vil2c, Fc, Avg, NoComm };

Mode mode_from_string(const std::string& s);
std::string mode_to_string(Mode m);

struct SimConfig {
    envs::EnvConfig env;
    envs::ChannelConstants chan;
    double bandwidth_budget = 1e4;  // Hz
    double power_budget = 1.0;      // W
    double t_step = 1.0;            // seconds
    double t_max = 0.5;             // <= t_step
    double entropy_threshold = 1.0; // I, bits
    Mode mode = Mode::Vil2c;
    double avg_wait_fraction = 0.3;
    agent::AgentSettings agent_settings;
    int episode_length = 25;
    double mdp_discount = 0.95;
    // >= 0 overrides every link latency (evaluation sweeps).
    double forced_latency = -1.0;
    int hidden_width = 32;
    int key_width = 8;

    void validate() const;
};

// All learnable state: shared encoder/actor, per-agent ResoNets, critic.
struct Policies {
    agent::PolicyNets policy;
    std::vector<nets::ResoNetwork> resonets;
    nets::CriticNet critic;

    static Policies make(const SimConfig& cfg, uint64_t seed);
    nets::ParamList all_params();
    nets::ParamList actor_critic_params();
    nets::ParamList resonet_params();
};

struct LinkRecord {
    int sender = 0, recipient = 0;
    double bandwidth = 0.0, power = 0.0;
    double tau = 0.0;        // channel::kUndeliverable when rate is 0
    bool delivered = false;  // in buffer before recipient terminated
};

struct StepRecord {
    int step = 0;
    std::vector<LinkRecord> links;
    std::vector<double> wait;                       // w_i
    std::vector<std::vector<int>> buffer_senders;   // arrival order
    std::vector<int> actions;
    std::vector<double> log_probs;
    std::vector<double> termination_entropy;
    double reward = 0.0;
    double success = 0.0;
    // retained for centralized training
    std::vector<envs::AgentObservation> observations;
    std::vector<double> global_state;
};

struct EpisodeTrace {
    std::vector<StepRecord> steps;
    std::vector<double> final_global_state;  // for critic bootstrapping
    double discounted_return = 0.0;
    double undiscounted_return = 0.0;
    double mean_latency = 0.0;      // over finite link taus
    double mean_wait = 0.0;
    double delivery_fraction = 0.0;
    double mean_success = 0.0;
};

struct PendingDelivery {
    double time = 0.0;
    int sender = 0, recipient = 0;
    agent::Message message;
};

// Removes undelivered messages addressed to a terminated recipient.
void cancel_on_ack(std::vector<PendingDelivery>& pending, int recipient_id);

class Simulator {
public:
    explicit Simulator(SimConfig cfg);

    struct StepOutcome {
        StepRecord record;
        envs::WorldState next_state;
        std::vector<int> actions;
    };

    StepOutcome run_timestep(const envs::WorldState& state, Policies& policies,
                             const std::vector<int>& prev_actions, int step_index,
                             uint64_t episode_seed) const;
    EpisodeTrace run_episode(Policies& policies, uint64_t seed) const;

    const SimConfig& config() const { return cfg_; }
    const envs::Env& env() const { return env_; }

private:
    SimConfig cfg_;
    envs::Env env_;
};

// Parallel rollout collection; results depend only on (root_seed, count),
// never on worker count.
std::vector<EpisodeTrace> run_episodes(const Simulator& simulator, Policies& policies,
                                       uint64_t root_seed, int count, int workers);

// JSON Lines, one object per timestep; schema carries a version field.
std::string trace_to_jsonl(const EpisodeTrace& trace);
std::string summary_csv_header();
std::string summary_csv_row(const EpisodeTrace& trace);

}  // namespace vil2c::sim
