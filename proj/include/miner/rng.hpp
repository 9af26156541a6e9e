#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "miner/error.hpp"

namespace miner {

// splitmix64 step, used for seed mixing and stream derivation.
std::uint64_t mix64(std::uint64_t x);

// Combine a seed with stream identifiers into a new seed.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0,
                       std::uint64_t c = 0);

// Deterministic RNG. mt19937_64 is fully specified by the standard and the
// uniform/normal transforms below avoid the implementation-defined
// std::*_distribution classes, so a given seed yields the same stream on
// every platform.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : seed_(seed), engine_(mix64(seed)) {}

    std::uint64_t bits() { return engine_(); }

    // Uniform in [0, 1), 53-bit resolution.
    double uniform() { return static_cast<double>(bits() >> 11) * 0x1.0p-53; }

    // Uniform integer in [0, n).
    std::uint64_t uniform_int(std::uint64_t n) {
        MINER_CHECK(n > 0, "uniform_int: n must be positive");
        // rejection sampling keeps the draw unbiased
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
        std::uint64_t v = bits();
        while (v >= limit) v = bits();
        return v % n;
    }

    // Standard normal via Box-Muller, one cached spare.
    double normal();

    std::vector<double> normal_vec(std::size_t n);

    // Independent deterministic substream.
    Rng derive(std::uint64_t stream) const { return Rng(mix_seed(seed_, stream)); }

    std::uint64_t seed() const { return seed_; }

private:
    std::uint64_t seed_;
    std::mt19937_64 engine_;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

} // namespace miner
