#pragma once

#include <array>
#include <cmath>
#include <cstdint>

namespace spikemark {

/// Advances a splitmix64 state and returns the next output.
/// Used for seed expansion and sub-stream derivation only; bulk random
/// numbers come from rng256 below.
inline std::uint64_t splitmix64_next(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// index-th output (0-based) of a splitmix64 stream started at `seed`.
/// Gives independent, documented sub-seeds: instance i of a benchmark run
/// with base seed s uses derive_seed(s, i).
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) {
    std::uint64_t s = seed;
    std::uint64_t v = 0;
    for (std::uint64_t i = 0; i <= index; ++i) v = splitmix64_next(s);
    return v;
}

/// xoshiro256++ with splitmix64 seed expansion. The algorithm is fixed so
/// that generated matrices, graphs, and solver runs reproduce bit-exactly
/// for a given seed, independent of the standard library.
class rng256 {
public:
    using result_type = std::uint64_t;

    explicit rng256(std::uint64_t seed) {
        std::uint64_t sm = seed;
        for (auto& word : state_) word = splitmix64_next(sm);
    }

    std::uint64_t next() {
        const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
        const std::uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = rotl(state_[3], 45);
        return result;
    }

    static constexpr std::uint64_t min() { return 0; }
    static constexpr std::uint64_t max() { return ~0ULL; }
    std::uint64_t operator()() { return next(); }

    /// Uniform double in [0, 1) built from the top 53 bits.
    double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    /// Unbiased integer in [0, bound); bound must be >= 1.
    std::uint64_t below(std::uint64_t bound) {
        if (bound <= 1) return 0;
        const std::uint64_t threshold = (0 - bound) % bound;  // 2^64 mod bound
        std::uint64_t v = next();
        while (v < threshold) v = next();
        return v % bound;
    }

    /// Standard normal via Marsaglia's polar method (sqrt/log only, no trig).
    /// Pairs are drawn from the uniform stream; the second value is cached.
    double normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u, v, s;
        do {
            u = 2.0 * uniform01() - 1.0;
            v = 2.0 * uniform01() - 1.0;
            s = u * u + v * v;
        } while (s >= 1.0 || s == 0.0);
        const double m = std::sqrt(-2.0 * std::log(s) / s);
        spare_ = v * m;
        has_spare_ = true;
        return u * m;
    }

private:
    static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

    std::array<std::uint64_t, 4> state_{};
    double spare_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace spikemark
