#pragma once

// Counter-based random values built on the splitmix64 finalizer.
// Every sample is a pure function of (seed, counter), so generated scenes
// are bit-identical across platforms and independent of evaluation order.

#include <cstdint>

namespace flexgs {

constexpr uint64_t splitmix64(uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Independent 64-bit stream value for a (seed, counter) pair.
constexpr uint64_t counter_rand(uint64_t seed, uint64_t counter) {
    return splitmix64(splitmix64(counter) ^ seed);
}

// Uniform double in [0, 1), 53 mantissa bits.
constexpr double uniform01(uint64_t seed, uint64_t counter) {
    return static_cast<double>(counter_rand(seed, counter) >> 11) * 0x1.0p-53;
}

constexpr double uniform_range(uint64_t seed, uint64_t counter, double lo, double hi) {
    return lo + (hi - lo) * uniform01(seed, counter);
}

// Convenience for sequential draws from one logical stream.
class CounterRng {
public:
    explicit CounterRng(uint64_t seed, uint64_t stream = 0)
        : seed_(splitmix64(seed) ^ splitmix64(stream * 0x9e3779b97f4a7c15ULL + 1)) {}

    uint64_t next_u64() { return counter_rand(seed_, counter_++); }
    double next01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }
    double next(double lo, double hi) { return lo + (hi - lo) * next01(); }
    float nextf(float lo, float hi) { return static_cast<float>(next(lo, hi)); }
    // Uniform integer in [0, n); n must be > 0. Modulo bias is irrelevant
    // for test-sized n.
    uint64_t next_below(uint64_t n) { return next_u64() % n; }

private:
    uint64_t seed_;
    uint64_t counter_ = 0;
};

}  // namespace flexgs
