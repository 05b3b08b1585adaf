#pragma once
#include <cmath>
#include <functional>
#include <string>

#include "vil2c/nets.hpp"
#include "vil2c/rng.hpp"

namespace vil2c::gradcheck {

struct Result {
    bool pass = true;
    double max_rel_err = 0.0;
    std::string worst_param;
    int probes = 0;
};

// Central finite differences against accumulated analytic gradients.
// loss_eval must be a pure function of the current parameter values;
// loss_backward must fill tensor.grad for the same loss.
inline Result check(const nets::ParamList& params,
                    const std::function<double()>& loss_eval,
                    const std::function<void()>& loss_backward, int n_probes,
                    double step, double rel_tol, uint64_t seed) {
    for (auto& [name, t] : params) t->zero_grad();
    loss_backward();

    Result res;
    Rng rng(seed);
    for (int k = 0; k < n_probes; ++k) {
        int pi = rng.uniform_int(0, (int)params.size() - 1);
        nets::Tensor* t = params[pi].second;
        int ei = rng.uniform_int(0, t->size() - 1);
        double saved = t->values[ei];
        t->values[ei] = saved + step;
        double up = loss_eval();
        t->values[ei] = saved - step;
        double down = loss_eval();
        t->values[ei] = saved;
        double fd = (up - down) / (2.0 * step);
        double an = t->grad[ei];
        double scale = std::max({std::abs(fd), std::abs(an), 1e-4});
        double rel = std::abs(fd - an) / scale;
        ++res.probes;
        if (rel > res.max_rel_err) {
            res.max_rel_err = rel;
            res.worst_param = params[pi].first + "[" + std::to_string(ei) + "]";
        }
        if (rel > rel_tol) res.pass = false;
    }
    return res;
}

}  // namespace vil2c::gradcheck
