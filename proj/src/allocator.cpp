#include "vil2c/allocator.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "vil2c/rng.hpp"

namespace vil2c::alloc {

namespace {

constexpr double kLn2 = 0.6931471805599453;

double link_objective(double xi_over_l, double atten, double b, double p) {
    if (b <= 0.0 || p <= 0.0) return 0.0;
    return xi_over_l * b * std::log2(1.0 + p / (atten * b));
}

struct Workspace {
    std::vector<double> xi_over_l;  // xi_j / L_j
    std::vector<double> atten;      // 10^(PL/10) * N0
};

Workspace make_workspace(const AllocationProblem& pr) {
    Workspace w;
    int n = pr.size();
    w.xi_over_l.resize(n);
    w.atten.resize(n);
    for (int j = 0; j < n; ++j) {
        w.xi_over_l[j] = pr.importances[j] / pr.message_bits[j];
        w.atten[j] = pr.attenuation(j);
    }
    return w;
}

double objective(const Workspace& w, const std::vector<double>& b,
                 const std::vector<double>& p) {
    double s = 0.0;
    for (size_t j = 0; j < b.size(); ++j)
        s += link_objective(w.xi_over_l[j], w.atten[j], b[j], p[j]);
    return s;
}

// Gradient with entries floored away from zero so the log terms stay finite.
void gradient(const Workspace& w, const std::vector<double>& b,
              const std::vector<double>& p, double b_floor, double p_floor,
              std::vector<double>& gb, std::vector<double>& gp) {
    int n = (int)b.size();
    gb.resize(n);
    gp.resize(n);
    for (int j = 0; j < n; ++j) {
        double bj = std::max(b[j], b_floor);
        double pj = std::max(p[j], p_floor);
        double g = pj / (w.atten[j] * bj);
        gb[j] = w.xi_over_l[j] * (std::log2(1.0 + g) - g / ((1.0 + g) * kLn2));
        gp[j] = w.xi_over_l[j] / (w.atten[j] * (1.0 + g) * kLn2);
    }
}

void snap_zeros(std::vector<double>& x, double budget) {
    double thr = kZeroFraction * budget;
    for (double& v : x)
        if (v < thr) v = 0.0;
}

ResourceAllocation make_alloc(const AllocationProblem& pr, std::vector<double> b,
                              std::vector<double> p) {
    ResourceAllocation a;
    a.bandwidth_budget = pr.bandwidth_budget;
    a.power_budget = pr.power_budget;
    a.bandwidth = std::move(b);
    a.power = std::move(p);
    return a;
}

}  // namespace

void AllocationProblem::validate() const {
    size_t n = importances.size();
    if (n == 0) throw std::invalid_argument("AllocationProblem: empty");
    if (message_bits.size() != n || links.size() != n)
        throw std::invalid_argument("AllocationProblem: length mismatch");
    if (!(bandwidth_budget > 0.0) || !(power_budget > 0.0))
        throw std::invalid_argument("AllocationProblem: budgets must be > 0");
    for (size_t j = 0; j < n; ++j) {
        if (importances[j] < 0.0)
            throw std::invalid_argument("AllocationProblem: negative importance");
        if (!(message_bits[j] > 0.0))
            throw std::invalid_argument("AllocationProblem: message size must be > 0");
    }
}

double AllocationProblem::attenuation(int j) const {
    const LinkState& l = links[j];
    double pl = channel::path_loss(channel::clamp_distance(l.distance),
                                   l.path_loss_exponent, l.path_loss_offset);
    return std::pow(10.0, pl / 10.0) * l.noise_density;
}

double total_voi(const AllocationProblem& problem, const ResourceAllocation& alloc) {
    problem.validate();
    if ((int)alloc.bandwidth.size() != problem.size() ||
        (int)alloc.power.size() != problem.size())
        throw std::invalid_argument("total_voi: allocation length mismatch");
    if (!alloc.feasible(1e-6)) throw std::domain_error("total_voi: infeasible allocation");
    Workspace w = make_workspace(problem);
    return objective(w, alloc.bandwidth, alloc.power);
}

ResourceAllocation allocate_equal(const AllocationProblem& problem) {
    problem.validate();
    int n = problem.size();
    return make_alloc(problem,
                      std::vector<double>(n, problem.bandwidth_budget / n),
                      std::vector<double>(n, problem.power_budget / n));
}

ResourceAllocation allocate_proportional(const AllocationProblem& problem) {
    problem.validate();
    int n = problem.size();
    double total = std::accumulate(problem.importances.begin(),
                                   problem.importances.end(), 0.0);
    if (total <= 0.0) return allocate_equal(problem);
    std::vector<double> b(n), p(n);
    for (int j = 0; j < n; ++j) {
        double f = problem.importances[j] / total;
        b[j] = problem.bandwidth_budget * f;
        p[j] = problem.power_budget * f;
    }
    return make_alloc(problem, std::move(b), std::move(p));
}

void project_simplex(std::vector<double>& x, double total) {
    // Held-style sort projection onto {x >= 0, sum x = total}.
    int n = (int)x.size();
    std::vector<double> u(x);
    std::sort(u.begin(), u.end(), std::greater<double>());
    double css = 0.0, theta = 0.0;
    int rho = 0;
    for (int i = 0; i < n; ++i) {
        css += u[i];
        double t = (css - total) / (i + 1);
        if (u[i] - t > 0) {
            rho = i + 1;
            theta = t;
        }
    }
    (void)rho;
    for (double& v : x) v = std::max(0.0, v - theta);
}

SolveResult allocate_optimal(const AllocationProblem& problem,
                             const SolverOptions& options) {
    problem.validate();
    int n = problem.size();
    Workspace w = make_workspace(problem);
    double bb = problem.bandwidth_budget, pb = problem.power_budget;
    double b_floor = kZeroFraction * bb, p_floor = kZeroFraction * pb;

    auto ascend = [&](std::vector<double> b, std::vector<double> p, bool& converged) {
        double f = objective(w, b, p);
        std::vector<double> gb, gp, nb, np;
        converged = false;
        for (int it = 0; it < options.max_iters; ++it) {
            gradient(w, b, p, b_floor, p_floor, gb, gp);
            // Scale the step so the first trial moves a meaningful fraction
            // of each budget.
            double gbn = 0.0, gpn = 0.0;
            for (int j = 0; j < n; ++j) {
                gbn = std::max(gbn, std::abs(gb[j]));
                gpn = std::max(gpn, std::abs(gp[j]));
            }
            if (gbn == 0.0 && gpn == 0.0) {
                converged = true;
                break;
            }
            double step = 1.0;
            double sb = gbn > 0 ? 0.5 * bb / gbn : 0.0;
            double sp = gpn > 0 ? 0.5 * pb / gpn : 0.0;
            bool improved = false;
            for (int ls = 0; ls < 30; ++ls) {
                nb = b;
                np = p;
                for (int j = 0; j < n; ++j) {
                    nb[j] += step * sb * gb[j];
                    np[j] += step * sp * gp[j];
                }
                project_simplex(nb, bb);
                project_simplex(np, pb);
                double nf = objective(w, nb, np);
                if (nf > f) {
                    double rel = (nf - f) / (std::abs(f) + 1e-300);
                    b = nb;
                    p = np;
                    f = nf;
                    improved = true;
                    if (rel < options.tolerance) converged = true;
                    break;
                }
                step *= 0.5;
            }
            if (!improved) {
                converged = true;
                break;
            }
            if (converged) break;
        }
        return std::make_pair(std::make_pair(b, p), f);
    };

    std::vector<std::pair<std::vector<double>, std::vector<double>>> starts;
    {
        ResourceAllocation eq = allocate_equal(problem);
        starts.push_back({eq.bandwidth, eq.power});
        ResourceAllocation pr = allocate_proportional(problem);
        starts.push_back({pr.bandwidth, pr.power});
        for (int j = 0; j < n; ++j) {
            std::vector<double> b(n, 0.0), p(n, 0.0);
            b[j] = bb;
            p[j] = pb;
            starts.push_back({b, p});
        }
        Rng rng(options.seed);
        for (int s = 0; s < options.jitter_starts; ++s) {
            std::vector<double> b(n), p(n);
            for (int j = 0; j < n; ++j) {
                b[j] = rng.uniform(0.0, 1.0);
                p[j] = rng.uniform(0.0, 1.0);
            }
            project_simplex(b, bb);
            project_simplex(p, pb);
            starts.push_back({b, p});
        }
    }

    SolveResult best;
    best.objective = -1.0;
    for (auto& s : starts) {
        bool conv = false;
        auto [bp, f] = ascend(s.first, s.second, conv);
        // Vertex starts are candidate solutions in their own right.
        double f0 = objective(w, s.first, s.second);
        if (f0 > f) {
            bp = s;
            f = f0;
            conv = true;
        }
        if (f > best.objective) {
            best.objective = f;
            best.allocation = make_alloc(problem, bp.first, bp.second);
            best.converged = conv;
        }
    }
    snap_zeros(best.allocation.bandwidth, bb);
    snap_zeros(best.allocation.power, pb);
    best.objective = objective(w, best.allocation.bandwidth, best.allocation.power);
    return best;
}

KktDiagnostics kkt_residuals(const AllocationProblem& problem,
                             const ResourceAllocation& alloc,
                             const KktOptions& options) {
    problem.validate();
    int n = problem.size();
    Workspace w = make_workspace(problem);
    KktDiagnostics d;
    d.snr.assign(n, 0.0);
    d.residuals.assign(n, 0.0);
    d.active.assign(n, false);
    d.boundary.assign(n, false);

    double sb = std::accumulate(alloc.bandwidth.begin(), alloc.bandwidth.end(), 0.0);
    double sp = std::accumulate(alloc.power.begin(), alloc.power.end(), 0.0);
    bool at_boundary = sb >= problem.bandwidth_budget * (1.0 - 1e-9) ||
                       sp >= problem.power_budget * (1.0 - 1e-9);

    std::vector<double> lhs_a(n, 0.0), lhs_b(n, 0.0);
    double sum_a = 0.0, sum_b = 0.0;
    int m = 0;
    for (int j = 0; j < n; ++j) {
        double bj = alloc.bandwidth[j], pj = alloc.power[j];
        if (bj <= kZeroFraction * problem.bandwidth_budget ||
            pj <= kZeroFraction * problem.power_budget)
            continue;  // inactive, excluded from the fit
        d.active[j] = true;
        d.boundary[j] = at_boundary;
        double g = pj / (w.atten[j] * bj);
        d.snr[j] = g;
        double a_term = std::log2(1.0 + g) - g / (1.0 + g) /
                        (options.ln2_correction ? kLn2 : 1.0);
        double b_term = g * bj / (pj * (1.0 + g)) /
                        (options.ln2_correction ? kLn2 : 1.0);
        lhs_a[j] = w.xi_over_l[j] * a_term;
        lhs_b[j] = w.xi_over_l[j] * b_term;
        sum_a += lhs_a[j];
        sum_b += lhs_b[j];
        ++m;
    }
    if (m > 0) {
        // Least squares of lhs(j) = const is the mean over active links.
        d.lambda_multiplier = sum_a / m;
        d.mu_multiplier = sum_b / m;
        for (int j = 0; j < n; ++j) {
            if (!d.active[j]) continue;
            d.residuals[j] = std::max(std::abs(lhs_a[j] - d.lambda_multiplier),
                                      std::abs(lhs_b[j] - d.mu_multiplier));
        }
    }
    return d;
}

SolveResult brute_force_oracle(const AllocationProblem& problem, int grid_resolution) {
    problem.validate();
    int n = problem.size();
    if (n > 3) throw std::invalid_argument("brute_force_oracle: N > 3 refused");
    Workspace w = make_workspace(problem);
    double bb = problem.bandwidth_budget, pb = problem.power_budget;
    SolveResult best;
    best.objective = -1.0;

    auto consider = [&](const std::vector<double>& b, const std::vector<double>& p) {
        double f = objective(w, b, p);
        if (f > best.objective) {
            best.objective = f;
            best.allocation = make_alloc(problem, b, p);
        }
    };

    if (n == 1) {
        consider({bb}, {pb});
        return best;
    }
    if (n == 2) {
        int g = grid_resolution;
        for (int i = 0; i <= g; ++i) {
            double fb = (double)i / g;
            std::vector<double> b = {bb * fb, bb * (1.0 - fb)};
            for (int k = 0; k <= g; ++k) {
                double fp = (double)k / g;
                consider(b, {pb * fp, pb * (1.0 - fp)});
            }
        }
        return best;
    }
    // n == 3: coarse simplex grid then local refinement around the best cell.
    int g = std::min(grid_resolution, 24);
    auto sweep = [&](double b0, double b1, double bw, double p0, double p1,
                     double pw, int res) {
        for (int i = 0; i <= res; ++i)
            for (int j = 0; i + j <= res; ++j) {
                double f0 = b0 + bw * i / res, f1 = b1 + bw * j / res;
                if (f0 + f1 > 1.0) continue;
                std::vector<double> b = {bb * f0, bb * f1, bb * (1.0 - f0 - f1)};
                for (int k = 0; k <= res; ++k)
                    for (int l = 0; k + l <= res; ++l) {
                        double h0 = p0 + pw * k / res, h1 = p1 + pw * l / res;
                        if (h0 + h1 > 1.0) continue;
                        consider(b, {pb * h0, pb * h1, pb * (1.0 - h0 - h1)});
                    }
            }
    };
    sweep(0.0, 0.0, 1.0, 0.0, 0.0, 1.0, g);
    double fb0 = best.allocation.bandwidth[0] / bb, fb1 = best.allocation.bandwidth[1] / bb;
    double fp0 = best.allocation.power[0] / pb, fp1 = best.allocation.power[1] / pb;
    double span = 2.0 / g;
    sweep(std::max(0.0, fb0 - span), std::max(0.0, fb1 - span), 2 * span,
          std::max(0.0, fp0 - span), std::max(0.0, fp1 - span), 2 * span, 16);
    return best;
}

}  // namespace vil2c::alloc
