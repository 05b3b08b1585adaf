#pragma once
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

namespace vil2c::channel {

// Latency of a link whose rate is zero.
inline constexpr double kUndeliverable = std::numeric_limits<double>::infinity();

// Agents are clamped to at least this separation before computing path
// loss; overlapping agents would otherwise drive the dB term to -inf.
inline constexpr double kMinDistance = 1.0;

struct LinkState {
    int sender_id = 0;
    int recipient_id = 0;
    double distance = 1.0;            // meters, >= kMinDistance expected
    double path_loss_exponent = 2.0;  // eta
    double path_loss_offset = 0.0;    // c, dB
    double noise_density = 1.0;       // N0, W/Hz, > 0
};

struct ResourceAllocation {
    std::vector<double> bandwidth;  // Hz per recipient
    std::vector<double> power;      // W per recipient
    double bandwidth_budget = 0.0;
    double power_budget = 0.0;

    bool feasible(double rel_tol = 1e-9) const {
        double sb = 0.0, sp = 0.0;
        for (double b : bandwidth) {
            if (b < 0) return false;
            sb += b;
        }
        for (double p : power) {
            if (p < 0) return false;
            sp += p;
        }
        return sb <= bandwidth_budget * (1.0 + rel_tol) + 1e-300 &&
               sp <= power_budget * (1.0 + rel_tol) + 1e-300;
    }
};

inline double clamp_distance(double d) { return d < kMinDistance ? kMinDistance : d; }

// Log-distance model: PL = 10 * eta * log10(d) + c, in dB.
inline double path_loss(double distance, double exponent, double offset_db) {
    if (!(distance > 0.0)) throw std::domain_error("path_loss: distance must be > 0");
    return 10.0 * exponent * std::log10(distance) + offset_db;
}

// R = B * log2(1 + P / (10^(PL/10) * B * N0)), zero when B or P is zero.
inline double shannon_rate(double bandwidth, double power, double path_loss_db,
                           double noise_density) {
    if (!(noise_density > 0.0)) throw std::domain_error("shannon_rate: N0 must be > 0");
    if (bandwidth < 0.0 || power < 0.0)
        throw std::domain_error("shannon_rate: negative bandwidth or power");
    if (bandwidth == 0.0 || power == 0.0) return 0.0;
    double atten = std::pow(10.0, path_loss_db / 10.0);
    double snr = power / (atten * bandwidth * noise_density);
    return bandwidth * std::log2(1.0 + snr);
}

inline double shannon_rate(const LinkState& link, double bandwidth, double power) {
    double pl = path_loss(clamp_distance(link.distance), link.path_loss_exponent,
                          link.path_loss_offset);
    return shannon_rate(bandwidth, power, pl, link.noise_density);
}

// tau = L / R; kUndeliverable when the rate is zero.
inline double latency(double message_bits, double rate) {
    if (!(message_bits > 0.0)) throw std::domain_error("latency: message size must be > 0");
    if (rate <= 0.0) return kUndeliverable;
    return message_bits / rate;
}

}  // namespace vil2c::channel
