#pragma once

#include "mimoae/ae.hpp"
#include "mimoae/baseline.hpp"
#include "mimoae/constellation.hpp"
#include "mimoae/rng.hpp"

#include <functional>
#include <memory>
#include <string>
#include <vector>

namespace mimoae {

struct StoppingRule {
    std::uint64_t min_errors = 100;
    std::uint64_t max_symbols = 10000000;
};

struct SerPoint {
    double snr_db;
    double ser;
    std::uint64_t symbols;
    std::uint64_t errors;
};

struct SerCurve {
    std::string system;
    std::uint64_t seed = 0;
    std::vector<SerPoint> points; // ascending snr_db
};

struct ChunkCount {
    std::uint64_t slots = 0;
    std::uint64_t errors = 0;
};

/// A transceiver closure simulates `blocks` independent blocks at the given
/// SNR, drawing everything (messages, channels, noise) from the stream, and
/// reports message slots simulated and how many were decided wrong. A block
/// may carry several message slots (Alamouti and open-loop: 2 slots, one per
/// code slot; multi-user: one per user).
using Transceiver = std::function<ChunkCount(std::size_t blocks, double snr_db,
                                             RngStream& stream)>;

/// Monte-Carlo SER at one SNR. Work is cut into fixed 1024-block chunks,
/// processed in waves of 8; chunk c of point p draws from stream index
/// (p << 32) | c, so results depend only on (seed, point_index), never on
/// thread count. Stopping is checked between waves, so counts overshoot the
/// rule by at most one wave.
SerPoint ser_point(const Transceiver& tx, double snr_db,
                   const StoppingRule& rule, std::uint64_t seed,
                   std::uint64_t point_index, int threads = 1);

/// ser_point over an SNR list (sorted ascending first; point_index follows
/// the sorted order).
SerCurve ser_sweep(const Transceiver& tx, std::vector<double> snrs,
                   const StoppingRule& rule, std::uint64_t seed,
                   const std::string& system_tag, int threads = 1);

/// Header `snr_db,ser,num_symbols,num_errors`, LF endings.
void write_curve(const SerCurve& curve, const std::string& path);

/// Several curves in one file with a leading `scheme` column.
void write_curves(const std::vector<SerCurve>& curves, const std::string& path);

/// Uncoded AWGN: one symbol per block, y = sqrt(gamma)·p + n with
/// gamma = 10^(snr_db/10).
Transceiver make_awgn_transceiver(Constellation c);

/// 2x1 Alamouti over Rayleigh block fading, two message slots per block.
Transceiver make_alamouti_transceiver(Constellation c, double p_t = 1.0);

/// 2x2 SVD precoding, QPSK on both streams, equal power; the joint 16-ary
/// message is the error unit.
Transceiver make_svd_qpsk_transceiver(double p_t = 1.0);

/// 2x2 SVD precoding with per-realization bit and power allocation over the
/// catalog; joint m-ary message error unit.
Transceiver make_svd_alloc_transceiver(std::size_t m, double p_t = 1.0);

/// Zero-forcing downlink to rows(h)=2 single-antenna users, one message slot
/// per user per block.
Transceiver make_zf_transceiver(Constellation c, double p_t = 1.0);

/// Any trained autoencoder system. Open-loop and SISO transmit from the
/// exactly normalized codebook; closed-loop and MU-MIMO normalize over each
/// evaluation chunk. Slots per block: l for open-loop, n_r for mu-mimo,
/// otherwise 1.
Transceiver make_ae_transceiver(std::shared_ptr<const AeSystem> sys);

} // namespace mimoae
