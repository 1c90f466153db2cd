#pragma once

#include <array>
#include <complex>
#include <cstdint>

namespace mimoae {

/// Counter-based stream RNG (Philox4x32-10).
///
/// A stream is identified by (seed, stream_index). Streams with the same seed
/// and different indices are structurally non-overlapping: the index is baked
/// into the counter block, not mixed into the key, so no pair of streams can
/// ever generate from the same counter value. This is what makes parallel
/// Monte Carlo runs reproducible regardless of how work is scheduled.
class RngStream {
public:
    RngStream(std::uint64_t seed, std::uint64_t stream_index);

    std::uint64_t seed() const { return seed_; }
    std::uint64_t stream_index() const { return stream_index_; }

    /// Next raw 64-bit word.
    std::uint64_t next_u64();

    /// Uniform double in [0, 1), 53-bit resolution.
    double uniform01();

    /// Standard normal, Box-Muller. Generated in pairs; one is cached.
    double normal();

    /// Circularly symmetric complex Gaussian with E|z|^2 = 1
    /// (variance 1/2 per real component).
    std::complex<double> complex_gaussian();

    /// Uniform integer in [0, m). Rejection sampling, no modulo bias.
    /// Requires m >= 1.
    std::uint64_t uniform_int(std::uint64_t m);

private:
    std::array<std::uint32_t, 4> next_block();

    std::uint64_t seed_;
    std::uint64_t stream_index_;
    std::uint64_t block_;
    std::array<std::uint32_t, 4> buf_{};
    int buf_pos_; // next unread u32 in buf_, 4 = empty
    double cached_normal_;
    bool have_cached_normal_;
};

} // namespace mimoae
