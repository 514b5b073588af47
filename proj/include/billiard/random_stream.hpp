#pragma once

#include <cstdint>

namespace billiard {

/// Counter-based random stream keyed by (master_seed, stream_index).
///
/// Output k of a stream is mix(key + (k + 1) * golden), i.e. SplitMix64 run
/// from a key derived by hashing both coordinates. Streams for different
/// indices share no state, so trials can be generated in any order or on any
/// thread and still see the same numbers.
class RandomStream {
public:
    RandomStream(std::uint64_t master_seed, std::uint64_t stream_index);

    std::uint64_t master_seed() const noexcept { return master_seed_; }
    std::uint64_t stream_index() const noexcept { return stream_index_; }

    std::uint64_t next_u64() noexcept;

    /// Uniform on [0, 1) with 53 random bits.
    double next_unit() noexcept;

    /// Uniform on [lo, hi); returns lo when lo == hi. Consumes one draw.
    double uniform(double lo, double hi) noexcept;

    /// Uniform integer in [0, bound) without modulo bias. bound must be > 0.
    std::uint64_t below(std::uint64_t bound) noexcept;

private:
    std::uint64_t master_seed_;
    std::uint64_t stream_index_;
    std::uint64_t state_;
};

/// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

/// Derives an unrelated seed from `seed` for a named purpose (e.g. bootstrap).
constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t purpose) noexcept {
    return mix64(mix64(seed ^ 0x5851F42D4C957F2DULL) + purpose * 0x9E3779B97F4A7C15ULL);
}

}  // namespace billiard
