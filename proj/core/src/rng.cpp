#include "polarkit/rng.hpp"

#include "polarkit/stats.hpp"

namespace polarkit {

std::uint64_t SplitMix64::next() {
    state_ += 0x9E3779B97F4A7C15ULL;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

double SplitMix64::next_double() {
    return static_cast<double>(next() >> 11) * 0x1.0p-53;
}

double SplitMix64::next_open_double() {
    return (static_cast<double>(next() >> 11) + 0.5) * 0x1.0p-53;
}

double SplitMix64::next_uniform(double lo, double hi) {
    return lo + (hi - lo) * next_double();
}

double SplitMix64::next_normal() {
    return inverse_normal_cdf(next_open_double());
}

SplitMix64 SplitMix64::substream(std::uint64_t id) const {
    SplitMix64 g(seed_ + (id + 1) * 0x9E3779B97F4A7C15ULL);
    return SplitMix64(g.next());
}

} // namespace polarkit
