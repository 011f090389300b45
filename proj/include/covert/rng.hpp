#pragma once

#include <cmath>
#include <cstdint>

namespace covert {

/// SplitMix64 finalizer; bijective on 64-bit words.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

/// Counter-based stream generator: draw i of stream (seed, stream) is
/// mix64(origin + i * GOLDEN), so any (seed, stream, draw-index) triple maps
/// to the same value no matter how the work is chunked or threaded.
class CounterRng {
public:
    CounterRng(std::uint64_t seed, std::uint64_t stream) noexcept
        : origin_(mix64(seed ^ mix64(stream * GOLDEN + 0x6A09E667F3BCC909ull))) {}

    std::uint64_t next() noexcept { return mix64(origin_ + ++count_ * GOLDEN); }

    /// Uniform on (0, 1]; never returns 0, so -log stays finite.
    double next_unit() noexcept {
        return static_cast<double>((next() >> 11) + 1) * 0x1.0p-53;
    }

    double next_uniform(double lo, double hi) noexcept {
        return lo + (hi - lo) * next_unit();
    }

    double next_exponential(double rate) noexcept {
        return -std::log(next_unit()) / rate;
    }

    bool next_bernoulli(double prob) noexcept { return next_unit() <= prob; }

private:
    static constexpr std::uint64_t GOLDEN = 0x9E3779B97F4A7C15ull;

    std::uint64_t origin_;
    std::uint64_t count_ = 0;
};

}  // namespace covert
