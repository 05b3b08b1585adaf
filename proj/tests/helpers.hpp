#pragma once
#include "vil2c/allocator.hpp"
#include "vil2c/rng.hpp"

namespace vil2c::testing {

// Random allocation instance with moderate channel/importance spread.
inline alloc::AllocationProblem random_problem(Rng& rng, int n) {
    alloc::AllocationProblem pr;
    pr.bandwidth_budget = rng.uniform(0.5, 20.0);
    pr.power_budget = rng.uniform(0.5, 20.0);
    for (int j = 0; j < n; ++j) {
        pr.importances.push_back(rng.uniform(0.0, 4.0));
        pr.message_bits.push_back(rng.uniform(16.0, 512.0));
        channel::LinkState ls;
        ls.sender_id = 0;
        ls.recipient_id = j + 1;
        ls.distance = rng.uniform(1.0, 40.0);
        ls.path_loss_exponent = rng.uniform(2.0, 3.67);
        ls.path_loss_offset = rng.uniform(-10.0, 10.0);
        ls.noise_density = rng.uniform(0.05, 1.0);
        pr.links.push_back(ls);
    }
    return pr;
}

}  // namespace vil2c::testing
