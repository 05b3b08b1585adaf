#include <doctest.h>

#include <cmath>

#include "vil2c/theory.hpp"

using namespace vil2c;
using namespace vil2c::theory;

TEST_CASE("effective return: worked two-sample case") {
    std::vector<LatencyRewardSample> s = {
        {2.0, 0.5, 1.0},  // 2 e^{-0.5}
        {4.0, 0.0, 1.0},  // 4
    };
    double expect = 0.5 * (2.0 * std::exp(-0.5) + 4.0);
    CHECK(effective_return(s) == doctest::Approx(expect).epsilon(1e-12));
    // Zero latency makes the effective return the plain mean reward.
    std::vector<LatencyRewardSample> z = {{1.0, 0.0, 3.0}, {5.0, 0.0, 3.0}};
    CHECK(effective_return(z) == doctest::Approx(3.0));
}

TEST_CASE("covariance gap: two-point hand computation") {
    // R = (0, 2), e^{-lt} = (1, e^{-1}) with lambda 1, tau (0, 1).
    std::vector<LatencyRewardSample> s = {{0.0, 0.0, 1.0}, {2.0, 1.0, 1.0}};
    double e1 = 1.0, e2 = std::exp(-1.0);
    double gap_expect = 0.5 * (0.0 * e1 + 2.0 * e2) - 1.0 * 0.5 * (e1 + e2);
    CovarianceGap g = covariance_gap(s);
    CHECK(g.gap == doctest::Approx(gap_expect).epsilon(1e-12));
    // Two points: sample covariance (n-1) times (n-1)/n = gap.
    CHECK(g.gap == doctest::Approx(g.covariance * 0.5).epsilon(1e-12));
    CHECK(g.mc_error >= 0.0);
}

TEST_CASE("gap equals scaled sample covariance to machine precision") {
    Rng rng(77);
    for (int trial = 0; trial < 20; ++trial) {
        int n = rng.uniform_int(3, 200);
        std::vector<LatencyRewardSample> s(n);
        for (auto& x : s) {
            x.reward = rng.normal(0.0, 2.0);
            x.mean_latency = std::abs(rng.normal(0.2, 0.2));
            x.discount_rate = 1.5;
        }
        CovarianceGap g = covariance_gap(s);
        double scale = std::max({std::abs(g.gap), std::abs(g.covariance), 1e-12});
        CHECK(std::abs(g.gap - g.covariance * (n - 1.0) / n) / scale < 1e-12);
    }
}

TEST_CASE("independent rewards and latencies give a gap within error bars") {
    Rng rng(5);
    int n = 20000;
    std::vector<LatencyRewardSample> s(n);
    for (auto& x : s) {
        x.reward = rng.normal(1.0, 1.0);
        x.mean_latency = std::abs(rng.normal(0.3, 0.1));
        x.discount_rate = 2.0;
    }
    CovarianceGap g = covariance_gap(s);
    CHECK(std::abs(g.gap) < 5.0 * g.mc_error);
}

TEST_CASE("allocation pairing: voi-aware policy creates a positive gap") {
    PairingScenario sc;
    for (uint64_t seed : {11u, 12u, 13u}) {
        auto samples = simulate_allocation_pairing(sc, PairingPolicy::VoiAware, 4000, seed);
        REQUIRE((int)samples.size() == 4000);
        for (const auto& x : samples) {
            CHECK(x.mean_latency >= 0.0);
            CHECK(x.mean_latency <= sc.latency_cap + 1e-12);
            CHECK(x.discount_rate == sc.discount_rate);
        }
        CovarianceGap g = covariance_gap(samples);
        CHECK(g.gap > 0.0);
        CHECK(g.gap > 2.0 * g.mc_error);
    }
}

TEST_CASE("allocation pairing: equal split yields a smaller gap than voi-aware") {
    PairingScenario sc;
    auto aware = simulate_allocation_pairing(sc, PairingPolicy::VoiAware, 4000, 21);
    auto inherent = simulate_allocation_pairing(sc, PairingPolicy::Inherent, 4000, 21);
    CHECK(covariance_gap(aware).gap > covariance_gap(inherent).gap);
}

TEST_CASE("shuffling the reward-latency pairing nullifies the gap") {
    PairingScenario sc;
    auto samples = simulate_allocation_pairing(sc, PairingPolicy::VoiAware, 4000, 31);
    CovarianceGap before = covariance_gap(samples);
    shuffle_pairing(samples, 99);
    CovarianceGap after = covariance_gap(samples);
    CHECK(std::abs(after.gap) < 5.0 * after.mc_error);
    CHECK(std::abs(after.gap) < std::abs(before.gap));
}

TEST_CASE("degenerate scenario: homogeneous importance collapses the gap") {
    PairingScenario sc;
    sc.heterogeneous_importance = false;
    auto samples = simulate_allocation_pairing(sc, PairingPolicy::VoiAware, 4000, 41);
    CovarianceGap g = covariance_gap(samples);
    // uniform importance removes the reward signal that pairs with latency
    CHECK(std::abs(g.gap) < 5.0 * g.mc_error);
}

TEST_CASE("latency sweep: injected latency is honored and the bound constant is finite") {
    sim::SimConfig cfg;
    cfg.env = envs::default_pp_config();
    cfg.env.n_agents = 3;
    cfg.env.observation_radii = {1.2, 1.6, 2.0};
    cfg.hidden_width = 8;
    cfg.key_width = 4;
    cfg.episode_length = 3;
    sim::Policies policies = sim::Policies::make(cfg, 3);
    LatencyBoundResult res =
        latency_bound_sweep(cfg, policies, {0.0, 0.1, 0.3}, 4, 7, 1);
    REQUIRE(res.points.size() == 3);
    CHECK(res.points[0].injected_latency == 0.0);
    CHECK(res.points[1].injected_latency == 0.1);
    for (const auto& p : res.points) CHECK(std::isfinite(p.mean_return));
    CHECK(std::isfinite(res.fitted_c));
    // Repeatability for a fixed seed.
    LatencyBoundResult res2 =
        latency_bound_sweep(cfg, policies, {0.0, 0.1, 0.3}, 4, 7, 2);
    for (size_t i = 0; i < res.points.size(); ++i)
        CHECK(res.points[i].mean_return == res2.points[i].mean_return);
}
