#pragma once
#include <cmath>
#include <stdexcept>
#include <vector>

#include "vil2c/channel.hpp"

namespace vil2c::voi {

// Finite stand-in for an infinite KL divergence (support mismatch).
// Softmax-headed policies never emit exact zeros, so this only guards
// degenerate inputs.
inline constexpr double kKlCap = 30.0;

struct ActionDistribution {
    std::vector<double> p;

    bool valid(double tol = 1e-9) const {
        double s = 0.0;
        for (double x : p) {
            if (x < 0.0) return false;
            s += x;
        }
        return std::abs(s - 1.0) <= tol;
    }
    int size() const { return (int)p.size(); }
};

struct VoiRecord {
    double importance = 0.0;  // bits
    double latency = 0.0;     // seconds
    double voi = 0.0;         // bits/second
    bool capped = false;      // support-mismatch flag
};

// D_KL(with || without) in bits. Terms with with[k] == 0 contribute 0;
// with[k] > 0 while without[k] == 0 hits the cap.
inline double kl_importance(const ActionDistribution& with_message,
                            const ActionDistribution& without_message,
                            bool* capped = nullptr) {
    if (with_message.size() != without_message.size())
        throw std::invalid_argument("kl_importance: size mismatch");
    if (capped) *capped = false;
    double kl = 0.0;
    for (int k = 0; k < with_message.size(); ++k) {
        double a = with_message.p[k], b = without_message.p[k];
        if (a <= 0.0) continue;
        if (b <= 0.0) {
            if (capped) *capped = true;
            return kKlCap;
        }
        kl += a * std::log2(a / b);
    }
    // Floating cancellation can leave a tiny negative value for
    // near-identical distributions.
    if (kl < 0.0 && kl > -1e-12) kl = 0.0;
    return kl > kKlCap ? kKlCap : kl;
}

// H(p) = -sum p log2 p, with 0 log 0 = 0.
inline double entropy(const ActionDistribution& dist) {
    double h = 0.0;
    for (double x : dist.p)
        if (x > 0.0) h -= x * std::log2(x);
    return h < 0.0 ? 0.0 : h;
}

// VoI = xi / tau; a message that never arrives carries no value.
inline double value_of_information(double importance, double latency_s) {
    if (latency_s == channel::kUndeliverable) return 0.0;
    if (!(latency_s > 0.0)) throw std::domain_error("voi: latency must be > 0");
    return importance / latency_s;
}

inline VoiRecord make_record(double importance, double latency_s, bool capped = false) {
    VoiRecord r;
    r.importance = importance;
    r.latency = latency_s;
    r.voi = value_of_information(importance, latency_s);
    r.capped = capped;
    return r;
}

}  // namespace vil2c::voi
