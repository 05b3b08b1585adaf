#include "vil2c/agent.hpp"

#include <stdexcept>

namespace vil2c::agent {

namespace {

std::vector<nets::Var> constants(nets::Graph& g, const std::vector<double>& xs) {
    std::vector<nets::Var> out(xs.size());
    for (size_t i = 0; i < xs.size(); ++i) out[i] = g.constant(xs[i]);
    return out;
}

}  // namespace

Message encode(PolicyNets& nets, const AgentSettings& settings,
               const envs::AgentObservation& obs, int sender_id) {
    ad::Graph g;
    auto in = constants(g, obs.env_obs);
    auto out = nets.encoder.forward(g, in);
    Message m;
    m.sender_id = sender_id;
    m.payload = ad::values_of(out);
    m.size_bits = settings.size_bits();
    return m;
}

channel::ResourceAllocation resonet_forward(nets::ResoNetwork& net,
                                            const envs::AgentObservation& obs,
                                            double bandwidth_budget,
                                            double power_budget) {
    ad::Graph g;
    std::vector<double> input = obs.env_obs;
    input.insert(input.end(), obs.channel_obs.begin(), obs.channel_obs.end());
    auto in = constants(g, input);
    auto [b, p] = net.forward(g, in, bandwidth_budget, power_budget);
    channel::ResourceAllocation a;
    a.bandwidth = ad::values_of(b);
    a.power = ad::values_of(p);
    a.bandwidth_budget = bandwidth_budget;
    a.power_budget = power_budget;
    return a;
}

voi::ActionDistribution fuse_and_act(PolicyNets& nets, const Message& own,
                                     const std::vector<Message>& buffer) {
    ad::Graph g;
    auto own_v = constants(g, own.payload);
    std::vector<std::vector<ad::Var>> buf;
    buf.reserve(buffer.size());
    for (const Message& m : buffer) buf.push_back(constants(g, m.payload));
    auto probs = nets.actor.forward(g, own_v, buf);
    return voi::ActionDistribution{ad::values_of(probs)};
}

ReceptionState reception_step(const ReceptionState& state,
                              const std::optional<Message>& arrival, double now,
                              const ActFn& act_fn) {
    if (state.status == ReceptionStatus::Terminated)
        throw std::logic_error("reception_step: already terminated");
    ReceptionState next = state;
    if (arrival) {
        next.buffer.push_back(*arrival);
        voi::ActionDistribution dist = act_fn(next.buffer);
        next.latest = dist;
        next.elapsed_wait = std::min(now, next.max_wait);
        if (voi::entropy(dist) <= next.entropy_threshold) {
            next.status = ReceptionStatus::Terminated;
            next.final_distribution = dist;
            next.ack_raised = true;
        }
    } else if (now >= state.max_wait) {
        next.elapsed_wait = next.max_wait;
        next.status = ReceptionStatus::Terminated;
        next.final_distribution = next.latest ? *next.latest : act_fn(next.buffer);
        next.ack_raised = true;
    } else {
        next.elapsed_wait = std::min(now, next.max_wait);
    }
    return next;
}

double compute_importance(PolicyNets& nets, const Message& recipient_own,
                          const std::vector<Message>& recipient_buffer,
                          const Message& candidate) {
    std::vector<Message> with = recipient_buffer;
    with.push_back(candidate);
    voi::ActionDistribution after = fuse_and_act(nets, recipient_own, with);
    voi::ActionDistribution before = fuse_and_act(nets, recipient_own, recipient_buffer);
    return voi::kl_importance(after, before);
}

}  // namespace vil2c::agent
