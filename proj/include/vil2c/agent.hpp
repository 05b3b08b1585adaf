#pragma once
#include <functional>
#include <optional>
#include <vector>

#include "vil2c/channel.hpp"
#include "vil2c/env.hpp"
#include "vil2c/nets.hpp"
#include "vil2c/voi.hpp"

namespace vil2c::agent {

struct Message {
    int sender_id = -1;
    std::vector<double> payload;   // encoder output m_i
    double size_bits = 0.0;        // L_i
    double dispatch_time = 0.0;    // seconds within the step
};

enum class ReceptionStatus { Waiting, Terminated };

struct ReceptionState {
    std::vector<Message> buffer;          // arrival order
    double elapsed_wait = 0.0;
    double entropy_threshold = 1.0;       // I, bits
    double max_wait = 1.0;                // T_max
    ReceptionStatus status = ReceptionStatus::Waiting;
    std::optional<voi::ActionDistribution> latest;  // last computed distribution
    voi::ActionDistribution final_distribution;     // valid once terminated
    bool ack_raised = false;
};

// Shared policy networks (encoder + actor); ResoNet instances are
// per-agent.
struct PolicyNets {
    nets::EncoderNet encoder;
    nets::ActorNet actor;
};

struct AgentSettings {
    int msg_width = 8;
    double bits_per_element = 32.0;
    double size_bits() const { return msg_width * bits_per_element; }
};

// Plain-value forward passes (internal graphs, no gradient retained).
Message encode(PolicyNets& nets, const AgentSettings& settings,
               const envs::AgentObservation& obs, int sender_id);

channel::ResourceAllocation resonet_forward(nets::ResoNetwork& net,
                                            const envs::AgentObservation& obs,
                                            double bandwidth_budget,
                                            double power_budget);

voi::ActionDistribution fuse_and_act(PolicyNets& nets, const Message& own,
                                     const std::vector<Message>& buffer);

// Recomputes the action distribution per arrival; terminates on the
// entropy condition or at max_wait. act_fn maps a buffer to the fused
// distribution.
using ActFn = std::function<voi::ActionDistribution(const std::vector<Message>&)>;
ReceptionState reception_step(const ReceptionState& state,
                              const std::optional<Message>& arrival, double now,
                              const ActFn& act_fn);

// xi of `candidate` for the recipient described by (own, buffer):
// KL(fused with candidate || fused without). Centralized-training signal.
double compute_importance(PolicyNets& nets, const Message& recipient_own,
                          const std::vector<Message>& recipient_buffer,
                          const Message& candidate);

}  // namespace vil2c::agent
