#pragma once

#include <cstdint>

namespace polarkit {

/// SplitMix64 generator. Chosen because it is trivially specified (one
/// 64-bit additive state plus a finalizer), splittable, and therefore
/// reproducible bit-for-bit in any implementation language:
///
///   state += 0x9E3779B97F4A7C15
///   z = state
///   z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
///   z = (z ^ (z >> 27)) * 0x94D049BB133111EB
///   return z ^ (z >> 31)
///
/// Substream i is a SplitMix64 seeded with
/// SplitMix64(seed + (i+1) * 0x9E3779B97F4A7C15).next().
/// Uniform doubles take the top 53 bits; normal variates go through the
/// inverse normal CDF so tables are byte-identical across platforms.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : seed_(seed), state_(seed) {}

    std::uint64_t next();

    /// Uniform in [0, 1), 53-bit resolution.
    double next_double();

    /// Uniform strictly inside (0, 1); safe input for inverse CDFs.
    double next_open_double();

    double next_uniform(double lo, double hi);

    /// Standard normal via the inverse-CDF method (deterministic, no
    /// rejection loop).
    double next_normal();

    /// Independent child stream derived from the construction seed only, so
    /// streams do not depend on how far the parent has advanced.
    SplitMix64 substream(std::uint64_t id) const;

    std::uint64_t seed() const { return seed_; }

private:
    std::uint64_t seed_;
    std::uint64_t state_;
};

} // namespace polarkit
