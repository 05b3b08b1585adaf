#pragma once
#include <cstdint>
#include <random>

namespace vil2c {

// splitmix64, used both as a generator and to derive independent
// per-episode / per-worker seed streams from a root seed.
struct SplitMix64 {
    uint64_t state;
    explicit SplitMix64(uint64_t seed) : state(seed) {}
    uint64_t next() {
        uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }
};

// Derive a child seed; results depend only on (root, index), never on
// call order, so parallel workers get identical streams.
inline uint64_t derive_seed(uint64_t root, uint64_t index) {
    SplitMix64 sm(root ^ (0x632be59bd9b4e019ULL * (index + 1)));
    sm.next();
    return sm.next();
}

// Deterministic engine wrapper. std::mt19937_64 seeded via splitmix so
// nearby seeds do not correlate.
class Rng {
public:
    explicit Rng(uint64_t seed) {
        SplitMix64 sm(seed);
        std::seed_seq seq{(uint32_t)sm.next(), (uint32_t)sm.next(),
                          (uint32_t)sm.next(), (uint32_t)sm.next()};
        eng_.seed(seq);
    }
    double uniform(double lo, double hi) {
        return std::uniform_real_distribution<double>(lo, hi)(eng_);
    }
    double normal(double mean, double sd) {
        return std::normal_distribution<double>(mean, sd)(eng_);
    }
    int uniform_int(int lo, int hi) {  // inclusive
        return std::uniform_int_distribution<int>(lo, hi)(eng_);
    }
    std::mt19937_64& engine() { return eng_; }

private:
    std::mt19937_64 eng_;
};

}  // namespace vil2c
