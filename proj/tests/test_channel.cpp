#include <doctest.h>

#include "vil2c/channel.hpp"
#include "vil2c/rng.hpp"

using namespace vil2c;
using namespace vil2c::channel;

TEST_CASE("path_loss matches the log-distance model") {
    CHECK(path_loss(1.0, 2.0, 0.0) == doctest::Approx(0.0));
    CHECK(path_loss(10.0, 2.0, 0.0) == doctest::Approx(20.0));
    CHECK(path_loss(10.0, 3.67, 0.0) == doctest::Approx(36.7));
    CHECK(path_loss(10.0, 2.0, 30.0) == doctest::Approx(50.0));
    CHECK_THROWS_AS(path_loss(0.0, 2.0, 0.0), std::domain_error);
    CHECK_THROWS_AS(path_loss(-1.0, 2.0, 0.0), std::domain_error);
}

TEST_CASE("shannon_rate worked examples") {
    CHECK(shannon_rate(1.0, 1.0, 0.0, 1.0) == doctest::Approx(1.0));
    CHECK(shannon_rate(1.0, 3.0, 0.0, 1.0) == doctest::Approx(2.0));
    // 10 dB attenuation cancels a 10x power boost
    CHECK(shannon_rate(1.0, 10.0, 10.0, 1.0) == doctest::Approx(1.0));
    CHECK(shannon_rate(0.0, 1.0, 0.0, 1.0) == 0.0);
    CHECK(shannon_rate(1.0, 0.0, 0.0, 1.0) == 0.0);
    CHECK_THROWS_AS(shannon_rate(1.0, 1.0, 0.0, 0.0), std::domain_error);
    CHECK_THROWS_AS(shannon_rate(-1.0, 1.0, 0.0, 1.0), std::domain_error);
}

TEST_CASE("latency examples and undeliverable rule") {
    CHECK(latency(100.0, 50.0) == doctest::Approx(2.0));
    CHECK(latency(64.0, 64.0) == doctest::Approx(1.0));
    CHECK(latency(100.0, 0.0) == kUndeliverable);
    CHECK_THROWS_AS(latency(0.0, 1.0), std::domain_error);
}

TEST_CASE("rate monotonicity on random grids") {
    Rng rng(42);
    for (int k = 0; k < 200; ++k) {
        double b = rng.uniform(0.01, 10.0);
        double p = rng.uniform(0.01, 10.0);
        double pl = rng.uniform(0.0, 40.0);
        double n0 = rng.uniform(0.01, 2.0);
        double r = shannon_rate(b, p, pl, n0);
        CHECK(shannon_rate(b * 1.3, p, pl, n0) >= r - 1e-12);
        CHECK(shannon_rate(b, p * 1.3, pl, n0) >= r - 1e-12);
        CHECK(shannon_rate(b, p, pl + 3.0, n0) <= r + 1e-12);
    }
}

TEST_CASE("rate is degree-1 homogeneous in (B, P)") {
    Rng rng(7);
    for (int k = 0; k < 100; ++k) {
        double b = rng.uniform(0.01, 10.0);
        double p = rng.uniform(0.01, 10.0);
        double pl = rng.uniform(0.0, 40.0);
        double t = rng.uniform(0.1, 5.0);
        double lhs = shannon_rate(t * b, t * p, pl, 1.0);
        double rhs = t * shannon_rate(b, p, pl, 1.0);
        CHECK(lhs == doctest::Approx(rhs).epsilon(1e-9));
    }
}

TEST_CASE("latency strictly decreasing in rate") {
    double prev = latency(100.0, 1.0);
    for (double r = 2.0; r < 100.0; r += 1.0) {
        double cur = latency(100.0, r);
        CHECK(cur < prev);
        prev = cur;
    }
}

TEST_CASE("ResourceAllocation feasibility check") {
    ResourceAllocation a;
    a.bandwidth = {1.0, 2.0};
    a.power = {0.5, 0.5};
    a.bandwidth_budget = 3.0;
    a.power_budget = 1.0;
    CHECK(a.feasible());
    a.power[0] = 0.6;
    CHECK_FALSE(a.feasible());
    a.power[0] = -0.1;
    CHECK_FALSE(a.feasible());
}
