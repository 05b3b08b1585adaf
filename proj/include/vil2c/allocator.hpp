#pragma once
#include <cstdint>
#include <vector>

#include "vil2c/channel.hpp"

namespace vil2c::alloc {

using channel::LinkState;
using channel::ResourceAllocation;

struct AllocationProblem {
    std::vector<double> importances;   // xi_j, bits
    std::vector<double> message_bits;  // L_j
    std::vector<LinkState> links;
    double bandwidth_budget = 1.0;
    double power_budget = 1.0;

    int size() const { return (int)importances.size(); }
    void validate() const;
    // 10^(PL_j/10) * N0 for link j, distance clamped.
    double attenuation(int j) const;
};

struct SolverOptions {
    int max_iters = 400;
    double tolerance = 1e-6;   // relative improvement stop
    uint64_t seed = 0;         // multi-start jitter
    int jitter_starts = 4;
};

struct SolveResult {
    ResourceAllocation allocation;
    double objective = 0.0;
    bool converged = true;
};

struct KktOptions {
    // By default the stationarity equations use base-2 log terms with no
    // scaling; when true, include the 1/ln2 factors from differentiating log2.
    bool ln2_correction = false;
};

struct KktDiagnostics {
    std::vector<double> snr;        // gamma_j, inactive links -> 0
    double lambda_multiplier = 0.0;
    double mu_multiplier = 0.0;
    std::vector<double> residuals;  // inactive links -> 0
    std::vector<bool> active;       // B_j > 0 and P_j > 0
    std::vector<bool> boundary;     // allocation at a budget boundary
};

// Entries below this fraction of the budget are snapped to zero.
inline constexpr double kZeroFraction = 1e-12;

double total_voi(const AllocationProblem& problem, const ResourceAllocation& alloc);

ResourceAllocation allocate_equal(const AllocationProblem& problem);
ResourceAllocation allocate_proportional(const AllocationProblem& problem);

// Multi-start projected gradient ascent; starts at equal, proportional,
// every single-link vertex, plus seeded jitter points.
SolveResult allocate_optimal(const AllocationProblem& problem,
                             const SolverOptions& options = {});

KktDiagnostics kkt_residuals(const AllocationProblem& problem,
                             const ResourceAllocation& alloc,
                             const KktOptions& options = {});

// Exhaustive grid over budget-fraction splits. N <= 2 exact on the grid;
// N == 3 uses a coarse grid plus local refinement. Larger N refuses.
SolveResult brute_force_oracle(const AllocationProblem& problem, int grid_resolution);

// Euclidean projection onto {x >= 0, sum x = total}.
void project_simplex(std::vector<double>& x, double total);

}  // namespace vil2c::alloc
