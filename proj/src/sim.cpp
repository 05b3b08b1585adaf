#include "vil2c/sim.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <json.hpp>

#include "vil2c/rng.hpp"
#include "vil2c/voi.hpp"

namespace vil2c::sim {

using agent::Message;
using agent::ReceptionState;
using agent::ReceptionStatus;

Mode mode_from_string(const std::string& s) {
    if (s == "vil2c") return Mode::Vil2c;
    if (s == "fc") return Mode::Fc;
    if (s == "avg") return Mode::Avg;
    if (s == "nocomm") return Mode::NoComm;
    throw std::invalid_argument("unknown mode: " + s);
}

std::string mode_to_string(Mode m) {
    switch (m) {
        case Mode::Vil2c: return "vil2c";
        case Mode::Fc: return "fc";
        case Mode::Avg: return "avg";
        case Mode::NoComm: return "nocomm";
    }
    return "?";
}

void SimConfig::validate() const {
    if (!(t_step > 0.0)) throw std::invalid_argument("SimConfig: t_step must be > 0");
    if (!(t_max > 0.0) || t_max > t_step)
        throw std::invalid_argument("SimConfig: need 0 < t_max <= t_step");
    if (!(bandwidth_budget > 0.0) || !(power_budget > 0.0))
        throw std::invalid_argument("SimConfig: budgets must be > 0");
    if (entropy_threshold < 0.0)
        throw std::invalid_argument("SimConfig: entropy threshold must be >= 0");
    if (episode_length < 0)
        throw std::invalid_argument("SimConfig: negative episode length");
    if (avg_wait_fraction < 0.0 || avg_wait_fraction > 1.0)
        throw std::invalid_argument("SimConfig: avg_wait_fraction out of range");
    if (!(chan.noise_density > 0.0))
        throw std::invalid_argument("SimConfig: noise density must be > 0");
}

Policies Policies::make(const SimConfig& cfg, uint64_t seed) {
    Rng rng(derive_seed(seed, 0xA11));
    Policies p;
    int obs_w = cfg.env.obs_width();
    int peers = cfg.env.n_agents - 1;
    p.policy.encoder = nets::EncoderNet::make(obs_w, cfg.hidden_width,
                                              cfg.agent_settings.msg_width, rng);
    p.policy.actor = nets::ActorNet::make(cfg.agent_settings.msg_width, cfg.key_width,
                                          cfg.hidden_width, envs::kNumActions, rng);
    p.critic = nets::CriticNet::make(cfg.env.state_width(), 2 * cfg.hidden_width, rng);
    for (int i = 0; i < cfg.env.n_agents; ++i)
        p.resonets.push_back(
            nets::ResoNetwork::make(obs_w + peers, cfg.hidden_width, peers, rng));
    return p;
}

nets::ParamList Policies::actor_critic_params() {
    nets::ParamList out;
    nets::append(out, nets::params_of(policy.encoder, "encoder"));
    nets::append(out, nets::params_of(policy.actor, "actor"));
    nets::append(out, nets::params_of(critic, "critic"));
    return out;
}

nets::ParamList Policies::resonet_params() {
    nets::ParamList out;
    for (size_t i = 0; i < resonets.size(); ++i)
        nets::append(out, nets::params_of(resonets[i], "resonet" + std::to_string(i)));
    return out;
}

nets::ParamList Policies::all_params() {
    nets::ParamList out = actor_critic_params();
    nets::append(out, resonet_params());
    return out;
}

void cancel_on_ack(std::vector<PendingDelivery>& pending, int recipient_id) {
    std::erase_if(pending,
                  [recipient_id](const PendingDelivery& d) { return d.recipient == recipient_id; });
}

Simulator::Simulator(SimConfig cfg) : cfg_(std::move(cfg)), env_(cfg_.env) {
    cfg_.validate();
}

Simulator::StepOutcome Simulator::run_timestep(const envs::WorldState& state,
                                               Policies& policies,
                                               const std::vector<int>& prev_actions,
                                               int step_index,
                                               uint64_t episode_seed) const {
    const int n = cfg_.env.n_agents;
    StepOutcome out;
    StepRecord& rec = out.record;
    rec.step = step_index;
    rec.wait.assign(n, 0.0);
    rec.buffer_senders.resize(n);
    rec.actions.resize(n);
    rec.log_probs.resize(n);
    rec.termination_entropy.resize(n);
    rec.global_state = env_.global_state(state);

    // (1) observe + encode; every transmitter dispatches one message per
    // peer at local time 0.
    std::vector<envs::AgentObservation> obs(n);
    std::vector<Message> msgs(n);
    for (int i = 0; i < n; ++i) {
        obs[i] = env_.observe(state, i, cfg_.chan);
        msgs[i] = agent::encode(policies.policy, cfg_.agent_settings, obs[i], i);
    }
    rec.observations = obs;

    std::vector<voi::ActionDistribution> final_dist(n);
    const bool comm = cfg_.mode != Mode::NoComm;

    if (comm) {
        // (2) per-link allocations and latencies.
        for (int i = 0; i < n; ++i) {
            channel::ResourceAllocation alloc;
            if (cfg_.mode == Mode::Vil2c) {
                alloc = agent::resonet_forward(policies.resonets[i], obs[i],
                                               cfg_.bandwidth_budget, cfg_.power_budget);
            } else {
                int peers = n - 1;
                alloc.bandwidth.assign(peers, cfg_.bandwidth_budget / peers);
                alloc.power.assign(peers, cfg_.power_budget / peers);
                alloc.bandwidth_budget = cfg_.bandwidth_budget;
                alloc.power_budget = cfg_.power_budget;
            }
            int slot = 0;
            for (int j = 0; j < n; ++j) {
                if (j == i) continue;
                LinkRecord link;
                link.sender = i;
                link.recipient = j;
                link.bandwidth = alloc.bandwidth[slot];
                link.power = alloc.power[slot];
                channel::LinkState ls;
                ls.sender_id = i;
                ls.recipient_id = j;
                ls.distance = channel::clamp_distance(env_.distance(state, i, j));
                ls.path_loss_exponent = cfg_.chan.path_loss_exponent;
                ls.path_loss_offset = cfg_.chan.path_loss_offset;
                ls.noise_density = cfg_.chan.noise_density;
                double rate = channel::shannon_rate(ls, link.bandwidth, link.power);
                link.tau = channel::latency(cfg_.agent_settings.size_bits(), rate);
                if (cfg_.mode == Mode::Fc) link.tau = 0.0;
                if (cfg_.forced_latency >= 0.0) link.tau = cfg_.forced_latency;
                rec.links.push_back(link);
                ++slot;
            }
        }
    }

    auto act_fn_for = [&](int i) {
        return [&policies, &msgs, i](const std::vector<Message>& buffer) {
            return agent::fuse_and_act(policies.policy, msgs[i], buffer);
        };
    };

    if (cfg_.mode == Mode::NoComm) {
        for (int i = 0; i < n; ++i) final_dist[i] = agent::fuse_and_act(policies.policy, msgs[i], {});
    } else if (cfg_.mode == Mode::Fc && cfg_.forced_latency <= 0.0) {
        // Latency-free full communication: every buffer holds all N-1
        // messages, zero wait.
        for (auto& link : rec.links) link.delivered = true;
        for (int i = 0; i < n; ++i) {
            std::vector<Message> buffer;
            for (int j = 0; j < n; ++j)
                if (j != i) buffer.push_back(msgs[j]);
            for (const Message& m : buffer) rec.buffer_senders[i].push_back(m.sender_id);
            final_dist[i] = agent::fuse_and_act(policies.policy, msgs[i], buffer);
        }
    } else {
        // (3) deliveries in global time order, deterministic tie-break.
        std::vector<PendingDelivery> pending;
        for (const auto& link : rec.links) {
            if (link.tau == channel::kUndeliverable) continue;
            PendingDelivery d;
            d.time = msgs[link.sender].dispatch_time + link.tau;
            d.sender = link.sender;
            d.recipient = link.recipient;
            d.message = msgs[link.sender];
            pending.push_back(d);
        }
        std::sort(pending.begin(), pending.end(),
                  [](const PendingDelivery& a, const PendingDelivery& b) {
                      if (a.time != b.time) return a.time < b.time;
                      if (a.sender != b.sender) return a.sender < b.sender;
                      return a.recipient < b.recipient;
                  });

        const bool avg_mode = cfg_.mode == Mode::Avg || cfg_.mode == Mode::Fc;
        // Fc with forced latency degenerates to fixed-wait full reception.
        double fixed_wait = cfg_.mode == Mode::Fc ? cfg_.t_max
                                                  : cfg_.avg_wait_fraction * cfg_.t_step;
        double horizon = avg_mode ? fixed_wait : cfg_.t_max;

        std::vector<ReceptionState> reception(n);
        for (int i = 0; i < n; ++i) {
            reception[i].entropy_threshold = avg_mode ? -1.0 : cfg_.entropy_threshold;
            reception[i].max_wait = horizon;
            reception[i].latest = agent::fuse_and_act(policies.policy, msgs[i], {});
        }

        auto mark_delivered = [&](int sender, int recipient) {
            for (auto& link : rec.links)
                if (link.sender == sender && link.recipient == recipient)
                    link.delivered = true;
        };

        // (4) progressive reception with ACK cancellation.
        size_t cursor = 0;
        while (cursor < pending.size()) {
            PendingDelivery d = pending[cursor++];
            if (d.time > horizon) continue;  // dropped at the wait horizon
            ReceptionState& rs = reception[d.recipient];
            if (rs.status == ReceptionStatus::Terminated) continue;
            if (avg_mode) {
                // Fixed-wait baselines buffer arrivals without entropy checks.
                rs.buffer.push_back(d.message);
                mark_delivered(d.sender, d.recipient);
                continue;
            }
            rs = agent::reception_step(rs, d.message, d.time, act_fn_for(d.recipient));
            mark_delivered(d.sender, d.recipient);
            if (rs.status == ReceptionStatus::Terminated) {
                std::vector<PendingDelivery> rest(pending.begin() + cursor, pending.end());
                cancel_on_ack(rest, d.recipient);
                pending.resize(cursor);
                pending.insert(pending.end(), rest.begin(), rest.end());
            }
        }
        // (5) max-wait rule for agents still waiting.
        for (int i = 0; i < n; ++i) {
            ReceptionState& rs = reception[i];
            if (rs.status != ReceptionStatus::Terminated) {
                if (avg_mode) {
                    rs.elapsed_wait = fixed_wait;
                    rs.status = ReceptionStatus::Terminated;
                    rs.final_distribution =
                        agent::fuse_and_act(policies.policy, msgs[i], rs.buffer);
                } else {
                    rs = agent::reception_step(rs, std::nullopt, cfg_.t_max, act_fn_for(i));
                }
            }
            rec.wait[i] = rs.elapsed_wait;
            for (const Message& m : rs.buffer) rec.buffer_senders[i].push_back(m.sender_id);
            final_dist[i] = rs.final_distribution;
        }
    }

    // Sample actions; per-(episode, step, agent) seed streams.
    std::vector<envs::Vec2> disps(n);
    for (int i = 0; i < n; ++i) {
        rec.termination_entropy[i] = voi::entropy(final_dist[i]);
        Rng arng(derive_seed(episode_seed, 1000003ULL * (step_index + 1) + i));
        double u = arng.uniform(0.0, 1.0);
        double c = 0.0;
        int action = (int)final_dist[i].p.size() - 1;
        for (size_t k = 0; k < final_dist[i].p.size(); ++k) {
            c += final_dist[i].p[k];
            if (u <= c) {
                action = (int)k;
                break;
            }
        }
        rec.actions[i] = action;
        rec.log_probs[i] = std::log(std::max(final_dist[i].p[action], 1e-300));
        // (6) waiting fraction executes the previous action.
        double wf = rec.wait[i] / cfg_.t_step;
        envs::Vec2 dp = envs::action_direction(prev_actions[i]);
        envs::Vec2 dn = envs::action_direction(action);
        disps[i].x = cfg_.env.agent_speed * cfg_.t_step * (wf * dp.x + (1.0 - wf) * dn.x);
        disps[i].y = cfg_.env.agent_speed * cfg_.t_step * (wf * dp.y + (1.0 - wf) * dn.y);
    }

    // (7) environment transition and reward.
    envs::StepResult sr = env_.step(state, disps, cfg_.t_step);
    rec.reward = sr.reward;
    rec.success = sr.success;
    out.next_state = sr.state;
    out.actions = rec.actions;
    return out;
}

EpisodeTrace Simulator::run_episode(Policies& policies, uint64_t seed) const {
    EpisodeTrace trace;
    envs::WorldState state = env_.reset(derive_seed(seed, 0xE57));
    std::vector<int> prev_actions(cfg_.env.n_agents, 0);
    double disc = 1.0;
    double lat_sum = 0.0, wait_sum = 0.0, succ_sum = 0.0;
    long lat_count = 0, delivered = 0, dispatched = 0, wait_count = 0;
    for (int t = 0; t < cfg_.episode_length; ++t) {
        StepOutcome so = run_timestep(state, policies, prev_actions, t, seed);
        state = so.next_state;
        prev_actions = so.actions;
        trace.discounted_return += disc * so.record.reward;
        trace.undiscounted_return += so.record.reward;
        disc *= cfg_.mdp_discount;
        for (const auto& link : so.record.links) {
            ++dispatched;
            if (link.delivered) ++delivered;
            if (link.tau != channel::kUndeliverable) {
                lat_sum += link.tau;
                ++lat_count;
            }
        }
        for (double w : so.record.wait) {
            wait_sum += w;
            ++wait_count;
        }
        succ_sum += so.record.success;
        trace.steps.push_back(std::move(so.record));
    }
    trace.final_global_state = env_.global_state(state);
    trace.mean_latency = lat_count ? lat_sum / lat_count : 0.0;
    trace.mean_wait = wait_count ? wait_sum / wait_count : 0.0;
    trace.delivery_fraction = dispatched ? (double)delivered / dispatched : 0.0;
    trace.mean_success = cfg_.episode_length ? succ_sum / cfg_.episode_length : 0.0;
    return trace;
}

std::vector<EpisodeTrace> run_episodes(const Simulator& simulator, Policies& policies,
                                       uint64_t root_seed, int count, int workers) {
    std::vector<EpisodeTrace> traces(count);
    if (workers < 1) workers = 1;
    std::atomic<int> next{0};
    auto work = [&]() {
        for (;;) {
            int e = next.fetch_add(1);
            if (e >= count) break;
            traces[e] = simulator.run_episode(policies, derive_seed(root_seed, e));
        }
    };
    if (workers == 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        for (int w = 0; w < workers; ++w) pool.emplace_back(work);
        for (auto& t : pool) t.join();
    }
    return traces;
}

namespace {

nlohmann::json to_json(double x) {
    if (x == channel::kUndeliverable) return nullptr;
    return x;
}

}  // namespace

std::string trace_to_jsonl(const EpisodeTrace& trace) {
    std::ostringstream out;
    for (const StepRecord& s : trace.steps) {
        nlohmann::json j;
        j["v"] = 1;
        j["step"] = s.step;
        j["reward"] = s.reward;
        j["success"] = s.success;
        j["actions"] = s.actions;
        j["wait"] = s.wait;
        j["entropy"] = s.termination_entropy;
        j["buffers"] = s.buffer_senders;
        nlohmann::json links = nlohmann::json::array();
        for (const LinkRecord& l : s.links) {
            links.push_back({{"s", l.sender},
                             {"r", l.recipient},
                             {"b", l.bandwidth},
                             {"p", l.power},
                             {"tau", to_json(l.tau)},
                             {"d", l.delivered}});
        }
        j["links"] = links;
        out << j.dump() << "\n";
    }
    return out.str();
}

std::string summary_csv_header() {
    return "return_discounted,return_undiscounted,mean_latency,mean_wait,"
           "delivery_fraction,mean_success";
}

std::string summary_csv_row(const EpisodeTrace& trace) {
    char buf[256];
    std::snprintf(buf, sizeof(buf), "%.12g,%.12g,%.12g,%.12g,%.12g,%.12g",
                  trace.discounted_return, trace.undiscounted_return,
                  trace.mean_latency, trace.mean_wait, trace.delivery_fraction,
                  trace.mean_success);
    return buf;
}

}  // namespace vil2c::sim
