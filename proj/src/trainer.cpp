#include "vil2c/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <json.hpp>

#include "vil2c/rng.hpp"
#include "vil2c/voi.hpp"

namespace vil2c::train {

using ad::Graph;
using ad::Var;

void TrainConfig::validate() const {
    if (!(clip_epsilon > 0.0)) throw std::invalid_argument("TrainConfig: clip_epsilon must be > 0");
    if (mdp_discount < 0.0 || mdp_discount >= 1.0)
        throw std::invalid_argument("TrainConfig: discount out of [0,1)");
    if (gae_lambda < 0.0 || gae_lambda > 1.0)
        throw std::invalid_argument("TrainConfig: gae_lambda out of [0,1]");
    if (epochs < 1 || episodes_per_iter < 1)
        throw std::invalid_argument("TrainConfig: epochs/episodes must be >= 1");
}

void compute_advantages(const std::vector<double>& rewards,
                        const std::vector<double>& values, double bootstrap_value,
                        double discount, double gae_lambda,
                        std::vector<double>& advantages, std::vector<double>& targets) {
    size_t n = rewards.size();
    if (values.size() != n) throw std::invalid_argument("compute_advantages: length mismatch");
    advantages.assign(n, 0.0);
    targets.assign(n, 0.0);
    double gae = 0.0;
    for (int t = (int)n - 1; t >= 0; --t) {
        double next_v = (t + 1 < (int)n) ? values[t + 1] : bootstrap_value;
        double delta = rewards[t] + discount * next_v - values[t];
        gae = delta + discount * gae_lambda * gae;
        advantages[t] = gae;
        targets[t] = gae + values[t];
    }
}

double clipped_objective(double ratio, double advantage, double epsilon) {
    double clipped = std::clamp(ratio, 1.0 - epsilon, 1.0 + epsilon);
    return std::min(ratio * advantage, clipped * advantage);
}

namespace {

std::vector<Var> constants(Graph& g, const std::vector<double>& xs) {
    std::vector<Var> out(xs.size());
    for (size_t i = 0; i < xs.size(); ++i) out[i] = g.constant(xs[i]);
    return out;
}

// Rebuilds, under current parameters, the action distributions every agent
// acted from at this step: encoder for all agents, then actor over the
// recorded buffer membership.
std::vector<std::vector<Var>> step_distributions(Graph& g, const BatchStep& s,
                                                 sim::Policies& policies) {
    int n = (int)s.observations.size();
    std::vector<std::vector<Var>> msgs(n);
    for (int i = 0; i < n; ++i) {
        auto in = constants(g, s.observations[i].env_obs);
        msgs[i] = policies.policy.encoder.forward(g, in);
    }
    std::vector<std::vector<Var>> dists(n);
    for (int i = 0; i < n; ++i) {
        std::vector<std::vector<Var>> buffer;
        for (int sender : s.buffer_senders[i]) buffer.push_back(msgs[sender]);
        dists[i] = policies.policy.actor.forward(g, msgs[i], buffer);
    }
    return dists;
}

}  // namespace

double mappo_actor_loss(const RolloutBatch& batch, sim::Policies& policies,
                        const TrainConfig& cfg, bool backward) {
    if (batch.steps.empty()) return 0.0;
    double denom = (double)batch.steps.size() * batch.n_agents;
    double total = 0.0;
    for (const BatchStep& s : batch.steps) {
        Graph g;
        auto dists = step_distributions(g, s, policies);
        std::vector<Var> terms;
        for (int i = 0; i < batch.n_agents; ++i) {
            int a = s.actions[i];
            Var logp = ad::log(dists[i][a]);
            if (!std::isfinite(logp.val()))
                throw std::runtime_error("mappo_actor_loss: non-finite log-probability");
            Var ratio = ad::exp(logp - s.behavior_log_probs[i]);
            if (!std::isfinite(ratio.val()))
                throw std::runtime_error("mappo_actor_loss: non-finite ratio");
            double adv = s.advantage;
            // min(rA, clip(r)A): pick the branch by value; its local
            // gradient is exact except on the tie set.
            double lo = 1.0 - cfg.clip_epsilon, hi = 1.0 + cfg.clip_epsilon;
            double rv = ratio.val();
            double clipped_v = std::clamp(rv, lo, hi);
            Var term = (rv * adv <= clipped_v * adv)
                           ? ratio * adv
                           : g.constant(clipped_v * adv);
            if (cfg.entropy_coef > 0.0) {
                std::vector<Var> hterms;
                for (const Var& p : dists[i]) hterms.push_back(p * ad::log2(p));
                term = term - cfg.entropy_coef * ad::sum_pairwise(hterms);
            }
            terms.push_back(term);
        }
        Var obj = ad::sum_pairwise(terms) / denom;
        total += obj.val();
        if (backward) {
            // Ascend the objective: backprop the negated loss.
            Var loss = -obj;
            g.backward(loss);
        }
    }
    return total;
}

double critic_loss(const RolloutBatch& batch, sim::Policies& policies, bool backward) {
    if (batch.steps.empty()) return 0.0;
    double denom = (double)batch.steps.size();
    double total = 0.0;
    for (const BatchStep& s : batch.steps) {
        Graph g;
        auto state = constants(g, s.global_state);
        Var v = policies.critic.forward(g, state);
        Var err = v - s.return_target;
        Var loss = err * err / denom;
        total += loss.val();
        if (backward) g.backward(loss);
    }
    return total;
}

double resonet_loss(const RolloutBatch& batch, sim::Policies& policies,
                    const sim::SimConfig& scfg, const TrainConfig& cfg, bool backward) {
    if (batch.steps.empty()) return 0.0;
    int peers = batch.n_agents - 1;
    if (peers < 1) return 0.0;
    double message_bits = scfg.agent_settings.size_bits();
    double denom;
    if (cfg.resonet_per_episode_voi) {
        int episodes = 0;
        for (const BatchStep& s : batch.steps) episodes = std::max(episodes, s.episode + 1);
        denom = (double)std::max(episodes, 1);
    } else {
        denom = (double)batch.steps.size();
    }
    double total = 0.0;
    for (const BatchStep& s : batch.steps) {
        for (int i = 0; i < batch.n_agents; ++i) {
            Graph g;
            std::vector<double> input = s.observations[i].env_obs;
            input.insert(input.end(), s.observations[i].channel_obs.begin(),
                         s.observations[i].channel_obs.end());
            auto in = constants(g, input);
            auto [bw, pw] = policies.resonets[i].forward(g, in, scfg.bandwidth_budget,
                                                         scfg.power_budget);
            std::vector<Var> terms;
            for (int j = 0; j < peers; ++j) {
                double xi = s.importance[i][j];  // stop-gradient
                double atten = s.attenuation[i][j];
                Var snr = pw[j] / (bw[j] * atten);
                Var rate = bw[j] * ad::log2(1.0 + snr);
                terms.push_back(-(xi / message_bits) * rate);
            }
            Var loss = ad::sum_pairwise(terms) / denom;
            total += loss.val();
            if (backward) g.backward(loss);
        }
    }
    return total;
}

RolloutBatch build_batch(const sim::Simulator& simulator, sim::Policies& policies,
                         const std::vector<sim::EpisodeTrace>& traces,
                         const TrainConfig& cfg) {
    const sim::SimConfig& scfg = simulator.config();
    RolloutBatch batch;
    batch.n_agents = scfg.env.n_agents;
    int peers = batch.n_agents - 1;

    auto critic_value = [&](const std::vector<double>& state) {
        Graph g;
        auto in = constants(g, state);
        return policies.critic.forward(g, in).val();
    };

    for (size_t e = 0; e < traces.size(); ++e) {
        const sim::EpisodeTrace& tr = traces[e];
        std::vector<double> rewards, values;
        for (const sim::StepRecord& sr : tr.steps) {
            rewards.push_back(sr.reward);
            values.push_back(critic_value(sr.global_state));
        }
        double bootstrap = tr.final_global_state.empty()
                               ? 0.0
                               : critic_value(tr.final_global_state);
        std::vector<double> adv, targets;
        compute_advantages(rewards, values, bootstrap, cfg.mdp_discount, cfg.gae_lambda,
                           adv, targets);
        for (size_t t = 0; t < tr.steps.size(); ++t) {
            const sim::StepRecord& sr = tr.steps[t];
            BatchStep bs;
            bs.episode = (int)e;
            bs.observations = sr.observations;
            bs.buffer_senders = sr.buffer_senders;
            bs.actions = sr.actions;
            bs.behavior_log_probs = sr.log_probs;
            bs.global_state = sr.global_state;
            bs.reward = sr.reward;
            bs.value = values[t];
            bs.advantage = adv[t];
            bs.return_target = targets[t];

            // Centralized xi per link: KL of recipient's distribution with
            // vs without the candidate, against its recorded buffer.
            bs.importance.assign(batch.n_agents, std::vector<double>(peers, 0.0));
            bs.attenuation.assign(batch.n_agents, std::vector<double>(peers, 1.0));
            std::vector<agent::Message> msgs(batch.n_agents);
            for (int i = 0; i < batch.n_agents; ++i)
                msgs[i] = agent::encode(policies.policy, scfg.agent_settings,
                                        sr.observations[i], i);
            for (int i = 0; i < batch.n_agents; ++i) {
                int slot = 0;
                for (int j = 0; j < batch.n_agents; ++j) {
                    if (j == i) continue;
                    std::vector<agent::Message> base;
                    if (!cfg.importance_against_empty_buffer) {
                        for (int sender : sr.buffer_senders[j])
                            if (sender != i) base.push_back(msgs[sender]);
                    }
                    bs.importance[i][slot] = agent::compute_importance(
                        policies.policy, msgs[j], base, msgs[i]);
                    double pl = sr.observations[i].channel_obs[slot];
                    bs.attenuation[i][slot] =
                        std::pow(10.0, pl / 10.0) * scfg.chan.noise_density;
                    ++slot;
                }
            }
            batch.steps.push_back(std::move(bs));
        }
    }
    if (cfg.normalize_advantages && batch.steps.size() > 1) {
        double mean = 0.0, sq = 0.0;
        for (const BatchStep& s : batch.steps) mean += s.advantage;
        mean /= batch.steps.size();
        for (const BatchStep& s : batch.steps)
            sq += (s.advantage - mean) * (s.advantage - mean);
        double sd = std::sqrt(sq / batch.steps.size());
        if (sd > 1e-8)
            for (BatchStep& s : batch.steps) s.advantage = (s.advantage - mean) / sd;
    }
    return batch;
}

Trainer::Trainer(sim::SimConfig scfg, TrainConfig tcfg)
    : sim_(std::move(scfg)), cfg_(tcfg), policies_(sim::Policies::make(sim_.config(), tcfg.seed)) {
    cfg_.validate();
    actor_opt_.lr = cfg_.actor_lr;
    critic_opt_.lr = cfg_.critic_lr;
    resonet_opt_.lr = cfg_.resonet_lr;
}

IterationMetrics Trainer::iterate(int iteration) {
    IterationMetrics m;
    m.iteration = iteration;
    auto traces = sim::run_episodes(sim_, policies_,
                                    derive_seed(cfg_.seed, 7001 + iteration),
                                    cfg_.episodes_per_iter, cfg_.workers);
    double sum = 0.0, sumsq = 0.0, wsum = 0.0, lsum = 0.0;
    for (const auto& tr : traces) {
        sum += tr.undiscounted_return;
        sumsq += tr.undiscounted_return * tr.undiscounted_return;
        wsum += tr.mean_wait;
        lsum += tr.mean_latency;
    }
    int n = (int)traces.size();
    m.return_mean = sum / n;
    m.return_std = std::sqrt(std::max(0.0, sumsq / n - m.return_mean * m.return_mean));
    m.wait_mean = wsum / n;
    m.latency_mean = lsum / n;
    if (!std::isfinite(m.return_mean))
        throw std::runtime_error("Trainer: return diverged to NaN");

    RolloutBatch batch = build_batch(sim_, policies_, traces, cfg_);

    nets::ParamList actor_params;
    nets::append(actor_params, nets::params_of(policies_.policy.encoder, "encoder"));
    nets::append(actor_params, nets::params_of(policies_.policy.actor, "actor"));
    nets::ParamList critic_params = nets::params_of(policies_.critic, "critic");
    nets::ParamList reso_params = policies_.resonet_params();

    auto zero = [](nets::ParamList& ps) {
        for (auto& [name, t] : ps) t->zero_grad();
    };

    for (int epoch = 0; epoch < cfg_.epochs; ++epoch) {
        zero(actor_params);
        m.actor_loss = mappo_actor_loss(batch, policies_, cfg_, true);
        actor_opt_.step(actor_params);
        zero(critic_params);
        m.critic_loss = critic_loss(batch, policies_, true);
        critic_opt_.step(critic_params);
    }

    // Alternating phase: after the joint policy update, each agent's
    // ResoNet is refreshed on importances recomputed under the new policy.
    if (sim_.config().mode == sim::Mode::Vil2c) {
        RolloutBatch reso_batch = build_batch(sim_, policies_, traces, cfg_);
        zero(reso_params);
        m.resonet_loss = resonet_loss(reso_batch, policies_, sim_.config(), cfg_, true);
        resonet_opt_.step(reso_params);
        m.voi_mean = -m.resonet_loss;
    }
    return m;
}

std::vector<IterationMetrics> Trainer::train(
    const std::function<void(const IterationMetrics&)>& emit) {
    std::vector<IterationMetrics> all;
    for (int it = 0; it < cfg_.iterations; ++it) {
        IterationMetrics m = iterate(it);
        if (emit) emit(m);
        all.push_back(m);
    }
    return all;
}

std::string metrics_jsonl_row(const IterationMetrics& m) {
    nlohmann::json j;
    j["v"] = 1;
    j["iteration"] = m.iteration;
    j["return_mean"] = m.return_mean;
    j["return_std"] = m.return_std;
    j["wait_mean"] = m.wait_mean;
    j["latency_mean"] = m.latency_mean;
    j["voi_mean"] = m.voi_mean;
    j["actor_loss"] = m.actor_loss;
    j["critic_loss"] = m.critic_loss;
    j["resonet_loss"] = m.resonet_loss;
    return j.dump();
}

}  // namespace vil2c::train
