#include "vil2c/theory.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "vil2c/allocator.hpp"
#include "vil2c/rng.hpp"

namespace vil2c::theory {

double effective_return(const std::vector<LatencyRewardSample>& samples) {
    if (samples.empty()) throw std::invalid_argument("effective_return: empty input");
    double s = 0.0;
    for (const auto& x : samples) s += x.reward * std::exp(-x.discount_rate * x.mean_latency);
    return s / samples.size();
}

CovarianceGap covariance_gap(const std::vector<LatencyRewardSample>& samples) {
    size_t n = samples.size();
    if (n < 2) throw std::invalid_argument("covariance_gap: need >= 2 samples");
    double mr = 0.0, me = 0.0;
    std::vector<double> e(n);
    for (size_t k = 0; k < n; ++k) {
        e[k] = std::exp(-samples[k].discount_rate * samples[k].mean_latency);
        mr += samples[k].reward;
        me += e[k];
    }
    mr /= n;
    me /= n;
    CovarianceGap out;
    double cross = 0.0, cov = 0.0, var_u = 0.0;
    std::vector<double> u(n);
    for (size_t k = 0; k < n; ++k) {
        cross += samples[k].reward * e[k];
        u[k] = (samples[k].reward - mr) * (e[k] - me);
        cov += u[k];
    }
    out.gap = cross / n - mr * me;
    out.covariance = cov / (n - 1);
    double mu = cov / n;
    for (size_t k = 0; k < n; ++k) var_u += (u[k] - mu) * (u[k] - mu);
    // First-order delta method: the gap is the mean of u_k.
    out.mc_error = std::sqrt(var_u / n) / std::sqrt((double)n);
    return out;
}

std::vector<LatencyRewardSample> simulate_allocation_pairing(
    const PairingScenario& scenario, PairingPolicy policy, int n_samples,
    uint64_t seed) {
    std::vector<LatencyRewardSample> out;
    out.reserve(n_samples);
    for (int k = 0; k < n_samples; ++k) {
        Rng rng(derive_seed(seed, k));
        int n = scenario.n_links;
        alloc::AllocationProblem pr;
        pr.bandwidth_budget = scenario.bandwidth_budget;
        pr.power_budget = scenario.power_budget;
        // One distance per sample, shared by all links: allocation contrasts
        // then come from the importance profile alone.
        double d = rng.uniform(scenario.min_distance, scenario.max_distance);
        for (int j = 0; j < n; ++j) {
            double xi = scenario.heterogeneous_importance
                            ? rng.uniform(scenario.importance_lo, scenario.importance_hi)
                            : 1.0;
            pr.importances.push_back(xi);
            pr.message_bits.push_back(scenario.message_bits);
            channel::LinkState ls;
            ls.sender_id = 0;
            ls.recipient_id = j + 1;
            ls.distance = d;
            ls.path_loss_exponent = scenario.path_loss_exponent;
            ls.path_loss_offset = scenario.path_loss_offset;
            ls.noise_density = scenario.noise_density;
            pr.links.push_back(ls);
        }
        channel::ResourceAllocation a;
        if (policy == PairingPolicy::VoiAware) {
            alloc::SolverOptions opts;
            opts.seed = derive_seed(seed, 1000000ULL + k);
            opts.max_iters = 80;
            opts.jitter_starts = 0;
            a = alloc::allocate_optimal(pr, opts).allocation;
        } else {
            a = alloc::allocate_equal(pr);
        }
        // Measured link: latency of link 0, saturated at the wait cap,
        // paired with the reward its information supports.
        double rate0 = channel::shannon_rate(pr.links[0], a.bandwidth[0], a.power[0]);
        double tau0 = std::min(channel::latency(scenario.message_bits, rate0),
                               scenario.latency_cap);
        LatencyRewardSample s;
        s.mean_latency = tau0;
        s.reward = pr.importances[0] + rng.normal(0.0, scenario.reward_noise);
        s.discount_rate = scenario.discount_rate;
        out.push_back(s);
    }
    return out;
}

void shuffle_pairing(std::vector<LatencyRewardSample>& samples, uint64_t seed) {
    Rng rng(seed);
    std::vector<double> rewards(samples.size());
    for (size_t k = 0; k < samples.size(); ++k) rewards[k] = samples[k].reward;
    std::shuffle(rewards.begin(), rewards.end(), rng.engine());
    for (size_t k = 0; k < samples.size(); ++k) samples[k].reward = rewards[k];
}

LatencyBoundResult latency_bound_sweep(const sim::SimConfig& cfg,
                                       sim::Policies& policies,
                                       const std::vector<double>& tau_grid,
                                       int episodes_per_point, uint64_t seed,
                                       int workers) {
    if (tau_grid.empty() || tau_grid.front() != 0.0)
        throw std::invalid_argument("latency_bound_sweep: grid must start at 0");
    LatencyBoundResult out;
    for (double tau : tau_grid) {
        sim::SimConfig point_cfg = cfg;
        point_cfg.forced_latency = tau;
        sim::Simulator simulator(point_cfg);
        auto traces = sim::run_episodes(simulator, policies, seed, episodes_per_point,
                                        workers);
        double mean = 0.0;
        for (const auto& tr : traces) mean += tr.undiscounted_return;
        out.points.push_back({tau, mean / traces.size()});
    }
    double j0 = out.points.front().mean_return;
    out.fitted_c = 0.0;
    for (const auto& p : out.points)
        if (p.injected_latency > 0.0)
            out.fitted_c = std::max(out.fitted_c, (j0 - p.mean_return) / p.injected_latency);
    return out;
}

}  // namespace vil2c::theory
