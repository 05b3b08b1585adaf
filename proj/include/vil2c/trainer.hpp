#pragma once
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "vil2c/sim.hpp"

namespace vil2c::train {

struct TrainConfig {
    double clip_epsilon = 0.2;
    double mdp_discount = 0.99;
    double gae_lambda = 0.95;
    double actor_lr = 3e-3;
    double critic_lr = 3e-3;
    double resonet_lr = 3e-3;
    double entropy_coef = 0.01;
    int epochs = 4;
    int episodes_per_iter = 8;
    int iterations = 40;
    int workers = 1;
    uint64_t seed = 0;
    // xi conditioning for ResoNet supervision: recipient's current buffer
    // (minus the candidate) or the empty buffer.
    bool importance_against_empty_buffer = false;
    // Sum VoI per episode instead of per step before averaging.
    bool resonet_per_episode_voi = false;
    // Standardize advantages to zero mean / unit variance per batch.
    bool normalize_advantages = true;

    void validate() const;
};

// One flattened timestep from a rollout.
struct BatchStep {
    int episode = 0;
    std::vector<envs::AgentObservation> observations;
    std::vector<std::vector<int>> buffer_senders;
    std::vector<int> actions;
    std::vector<double> behavior_log_probs;
    std::vector<double> global_state;
    double reward = 0.0;
    double value = 0.0;
    double advantage = 0.0;
    double return_target = 0.0;
    // per (sender, peer slot): importance and channel attenuation
    std::vector<std::vector<double>> importance;
    std::vector<std::vector<double>> attenuation;
};

struct RolloutBatch {
    std::vector<BatchStep> steps;
    int n_agents = 0;
};

struct IterationMetrics {
    int iteration = 0;
    double return_mean = 0.0;
    double return_std = 0.0;
    double wait_mean = 0.0;
    double latency_mean = 0.0;
    double voi_mean = 0.0;  // mean per-step total VoI
    double actor_loss = 0.0;
    double critic_loss = 0.0;
    double resonet_loss = 0.0;
};

// GAE over one episode's reward/value sequences; targets = adv + values.
void compute_advantages(const std::vector<double>& rewards,
                        const std::vector<double>& values, double bootstrap_value,
                        double discount, double gae_lambda,
                        std::vector<double>& advantages, std::vector<double>& targets);

// min(r A, clip(r) A) pointwise; the optimizer ascends this.
double clipped_objective(double ratio, double advantage, double epsilon);

// Values of the three losses under the current parameters. The *_backward
// variants also accumulate gradients into the parameter tensors.
double mappo_actor_loss(const RolloutBatch& batch, sim::Policies& policies,
                        const TrainConfig& cfg, bool backward);
double critic_loss(const RolloutBatch& batch, sim::Policies& policies, bool backward);
double resonet_loss(const RolloutBatch& batch, sim::Policies& policies,
                    const sim::SimConfig& scfg, const TrainConfig& cfg, bool backward);

RolloutBatch build_batch(const sim::Simulator& simulator, sim::Policies& policies,
                         const std::vector<sim::EpisodeTrace>& traces,
                         const TrainConfig& cfg);

class Trainer {
public:
    Trainer(sim::SimConfig scfg, TrainConfig tcfg);

    IterationMetrics iterate(int iteration);
    // Runs cfg.iterations iterations; emit is called once per iteration.
    std::vector<IterationMetrics> train(
        const std::function<void(const IterationMetrics&)>& emit = {});

    sim::Policies& policies() { return policies_; }
    const sim::Simulator& simulator() const { return sim_; }

private:
    sim::Simulator sim_;
    TrainConfig cfg_;
    sim::Policies policies_;
    nets::Adam actor_opt_;
    nets::Adam critic_opt_;
    nets::Adam resonet_opt_;
};

std::string metrics_jsonl_row(const IterationMetrics& m);

}  // namespace vil2c::train
