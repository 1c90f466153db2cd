#pragma once

#include "mimoae/channel.hpp"
#include "mimoae/constellation.hpp"
#include "mimoae/linalg.hpp"
#include "mimoae/rng.hpp"

#include <utility>
#include <vector>

namespace mimoae {

/// Alamouti block for two unit-energy symbols, X = sqrt(p_t/2)·
/// [[p1, -p2*], [p2, p1*]], so XᴴX = p_t·I for constant-modulus points and in
/// expectation otherwise. Rows are antennas, columns slots.
ComplexMatrix alamouti_encode(std::size_t s1, std::size_t s2,
                              const Constellation& c, double p_t);

/// Matched-filter combining for one receive antenna over two slots, then
/// per-symbol nearest-point decisions. For this orthogonal code the result
/// equals exhaustive joint maximum likelihood. y and h are 1×2.
std::pair<std::size_t, std::size_t> alamouti_ml_detect(const ComplexMatrix& y,
                                                       const ComplexMatrix& h,
                                                       const Constellation& c,
                                                       double p_t, double n0);

/// Per-stream constellation and power choice for SVD precoding.
struct StreamAllocation {
    Constellation constellation;
    double power;
};

struct Allocation {
    std::vector<StreamAllocation> streams;
    double objective = 0.0; // ∏(1-Pe) when produced by solve_allocation

    std::size_t total_size() const; // ∏ |Ω_i|
};

/// {trivial1, bpsk, qpsk, qam8, qam16}.
std::vector<Constellation> default_catalog();

/// Exhaustive maximization of ∏(1-Pe(Ω_i, γ_i)) with γ_i = σ_i²·P_i/n0,
/// subject to ∏|Ω_i| = m and ΣP_i ≤ p_t. Candidates are ordered size
/// factorizations of m from the catalog (lexicographic) crossed with a
/// 101-point power grid; streams carrying a single-point constellation get
/// zero power. First candidate wins ties. Streams follow sigma's order.
Allocation solve_allocation(const std::vector<double>& sigma, std::size_t m,
                            double p_t, double n0,
                            const std::vector<Constellation>& catalog);

/// QPSK on every stream, p_t split equally.
Allocation equal_power_qpsk(std::size_t n_streams, double p_t);

/// Joint message <-> per-stream labels, mixed radix with stream 0 most
/// significant.
std::vector<std::size_t> split_message(std::size_t m, const Allocation& alloc);
std::size_t join_message(const std::vector<std::size_t>& labels,
                         const Allocation& alloc);

/// Precode x = V·s, combine Uᴴy = diag(sigma)·s + noise, detect per stream.
/// labels[i] indexes alloc.streams[i].constellation. Requires rank(h) ≥
/// stream count.
std::vector<std::size_t> svd_roundtrip(const ComplexMatrix& h,
                                       const std::vector<std::size_t>& labels,
                                       const Allocation& alloc, double n0,
                                       RngStream& stream);

/// Zero-forcing downlink: x = α·H†·s with α = sqrt(p_t)/‖H†‖_F, so each of
/// the rows(h) users sees y_i = α·s_i + n_i.
std::vector<std::size_t> zf_roundtrip(const ComplexMatrix& h,
                                      const std::vector<std::size_t>& labels,
                                      const Constellation& c, double p_t,
                                      double n0, RngStream& stream);

} // namespace mimoae
