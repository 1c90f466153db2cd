#include "mimoae/rng.hpp"

#include "mimoae/errors.hpp"

#include <cmath>

namespace mimoae {
namespace {

constexpr std::uint32_t kPhiloxM0 = 0xD2511F53u;
constexpr std::uint32_t kPhiloxM1 = 0xCD9E8D57u;
constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

inline void philox_round(std::array<std::uint32_t, 4>& ctr, std::uint32_t k0,
                         std::uint32_t k1) {
    std::uint64_t p0 = std::uint64_t(kPhiloxM0) * ctr[0];
    std::uint64_t p1 = std::uint64_t(kPhiloxM1) * ctr[2];
    std::uint32_t hi0 = std::uint32_t(p0 >> 32), lo0 = std::uint32_t(p0);
    std::uint32_t hi1 = std::uint32_t(p1 >> 32), lo1 = std::uint32_t(p1);
    ctr = {hi1 ^ ctr[1] ^ k0, lo1, hi0 ^ ctr[3] ^ k1, lo0};
}

} // namespace

RngStream::RngStream(std::uint64_t seed, std::uint64_t stream_index)
    : seed_(seed),
      stream_index_(stream_index),
      block_(0),
      buf_pos_(4),
      cached_normal_(0.0),
      have_cached_normal_(false) {}

std::array<std::uint32_t, 4> RngStream::next_block() {
    std::array<std::uint32_t, 4> ctr = {
        std::uint32_t(block_), std::uint32_t(block_ >> 32),
        std::uint32_t(stream_index_), std::uint32_t(stream_index_ >> 32)};
    std::uint32_t k0 = std::uint32_t(seed_);
    std::uint32_t k1 = std::uint32_t(seed_ >> 32);
    for (int r = 0; r < 10; ++r) {
        philox_round(ctr, k0, k1);
        k0 += kWeyl0;
        k1 += kWeyl1;
    }
    ++block_;
    return ctr;
}

std::uint64_t RngStream::next_u64() {
    if (buf_pos_ > 2) {
        buf_ = next_block();
        buf_pos_ = 0;
    }
    std::uint64_t lo = buf_[buf_pos_];
    std::uint64_t hi = buf_[buf_pos_ + 1];
    buf_pos_ += 2;
    return lo | (hi << 32);
}

double RngStream::uniform01() {
    return double(next_u64() >> 11) * 0x1.0p-53;
}

double RngStream::normal() {
    if (have_cached_normal_) {
        have_cached_normal_ = false;
        return cached_normal_;
    }
    double u1 = uniform01();
    double u2 = uniform01();
    // u1 = 0 would blow up the log; half a ulp above zero is harmless.
    double r = std::sqrt(-2.0 * std::log1p(-u1));
    double a = 2.0 * M_PI * u2;
    cached_normal_ = r * std::sin(a);
    have_cached_normal_ = true;
    return r * std::cos(a);
}

std::complex<double> RngStream::complex_gaussian() {
    constexpr double kHalfSqrt2 = 0.70710678118654752440;
    return {kHalfSqrt2 * normal(), kHalfSqrt2 * normal()};
}

std::uint64_t RngStream::uniform_int(std::uint64_t m) {
    if (m == 0) throw InvalidInputError("uniform_int: m must be >= 1");
    if (m == 1) return 0;
    // Largest multiple of m that fits in 64 bits; reject above it.
    std::uint64_t limit = ~std::uint64_t(0) - (~std::uint64_t(0) % m + 1) % m;
    for (;;) {
        std::uint64_t v = next_u64();
        if (v <= limit) return v % m;
    }
}

} // namespace mimoae
