#pragma once
#include <cstdint>
#include <vector>

#include "vil2c/sim.hpp"

namespace vil2c::theory {

struct LatencyRewardSample {
    double reward = 0.0;        // R
    double mean_latency = 0.0;  // tau bar, seconds
    double discount_rate = 1.0; // lambda, 1/seconds
};

struct CovarianceGap {
    double gap = 0.0;         // E[R e^-lt] - E[R] E[e^-lt]
    double covariance = 0.0;  // sample covariance, n-1 normalization
    double mc_error = 0.0;    // standard error of the gap
};

// Mean of R * exp(-lambda * tau) over samples.
double effective_return(const std::vector<LatencyRewardSample>& samples);

// gap == covariance * (n-1)/n by algebraic identity.
CovarianceGap covariance_gap(const std::vector<LatencyRewardSample>& samples);

enum class PairingPolicy { VoiAware, Inherent };

// Synthetic per-step scenario for the covariance-gap verifier. Each sample
// draws per-link importances and distances, allocates the shared budgets,
// and reports the latency of one measured link together with the reward its
// information supports. Under the voi-aware policy the measured link's
// latency falls as its importance share rises, pairing high rewards with
// low latency; equal splits leave the two independent. All links in a
// sample share one distance so the pairing is created by importance alone.
struct PairingScenario {
    int n_links = 3;
    double bandwidth_budget = 1e4;
    double power_budget = 1.0;
    double message_bits = 256.0;
    double noise_density = 1e-9;
    double path_loss_offset = 60.0;
    double path_loss_exponent = 3.67;
    double min_distance = 1.0, max_distance = 5.0;
    bool heterogeneous_importance = true;  // false => all importances 1
    double importance_lo = 0.5, importance_hi = 3.0;
    double reward_noise = 0.05;
    double latency_cap = 1.0;      // undelivered saturates at T_max
    double discount_rate = 2.0;    // lambda
};

std::vector<LatencyRewardSample> simulate_allocation_pairing(
    const PairingScenario& scenario, PairingPolicy policy, int n_samples,
    uint64_t seed);

// Destroys the R-tau pairing in place (null model for the gap).
void shuffle_pairing(std::vector<LatencyRewardSample>& samples, uint64_t seed);

struct SweepPoint {
    double injected_latency = 0.0;
    double mean_return = 0.0;
};

struct LatencyBoundResult {
    std::vector<SweepPoint> points;
    double fitted_c = 0.0;  // max over grid of (J(0) - J(tau)) / tau
};

// Evaluation episodes with artificially injected constant latency.
LatencyBoundResult latency_bound_sweep(const sim::SimConfig& cfg,
                                       sim::Policies& policies,
                                       const std::vector<double>& tau_grid,
                                       int episodes_per_point, uint64_t seed,
                                       int workers = 1);

}  // namespace vil2c::theory
