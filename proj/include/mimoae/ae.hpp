#pragma once

#include "mimoae/channel.hpp"
#include "mimoae/constellation.hpp"
#include "mimoae/linalg.hpp"
#include "mimoae/nn.hpp"
#include "mimoae/rng.hpp"

#include <string>
#include <vector>

namespace mimoae {

enum class SystemKind { siso, open_loop, closed_loop, mu_mimo };

std::string to_string(SystemKind kind);
SystemKind system_kind_from_string(const std::string& name);

/// Transmitter/receiver networks plus the channel geometry they are wired
/// to. The transmitter output is always batch power-normalized before the
/// channel. mu_mimo carries one receiver per user; the others have one.
struct AeSystem {
    SystemKind kind;
    std::size_t m;   // messages per user and slot
    std::size_t n_t, n_r, n_b, l;
    double p_t = 1.0;
    MlpModel tx;
    std::vector<MlpModel> rx;
};

/// One-hot alphabet of the transmitter: m (siso, closed_loop), m^l
/// (open_loop), m^{n_r} (mu_mimo).
std::size_t message_alphabet(const AeSystem& sys);

/// Joint message <-> per-slot or per-user digits, base m, digit 0 most
/// significant.
std::vector<std::size_t> message_digits(std::size_t joint, std::size_t m,
                                        std::size_t count);
std::size_t message_join(const std::vector<std::size_t>& digits, std::size_t m);

struct TrainConfig {
    double snr_db = 15.0;
    std::size_t batch = 2048;
    double lr = 1e-3;
    std::size_t updates = 1;
    std::uint64_t seed = 1;
};

/// Networks per system kind, He-initialized from the stream:
///   siso         tx m -> 64 -> 64 -> 2,          rx 2 -> 64 -> 64 -> m
///   open_loop    tx m^l -> 256 x2 -> 8,          rx 8 -> 2048 x3 -> m^l
///                (hidden depth 5 for m = 16)
///   closed_loop  tx m+8 -> 64 x3 -> 4,           rx 12 -> 512 x3 -> m
///   mu_mimo      tx m^2+8 -> 512 x3 -> 4,        rx 6 -> 256 x3 -> m, per user
AeSystem build_system(SystemKind kind, std::size_t m, RngStream& init_stream);

/// Everything one batch produces on the way to the loss, retained so the
/// backward pass can chain through receiver, channel, normalization, and
/// transmitter.
struct AeForward {
    std::size_t batch = 0;
    std::vector<std::size_t> messages;     // joint, in [0, alphabet)
    std::vector<ComplexMatrix> channels;   // per sample; empty for siso
    ForwardPass tx_pass;
    std::vector<double> x_pre;             // tx output before normalization
    PowerNorm pn{1.0, 0.0};
    std::vector<ComplexMatrix> y;          // per sample, n_r x n_b
    std::vector<ForwardPass> rx_pass;      // per receiver
    std::vector<std::vector<std::size_t>> rx_labels;
    double loss = 0.0;                     // mean CE, summed over receivers
};

/// Transmit, normalize, cross the channel, and run the receiver(s).
/// channels must hold one n_r x n_t realization per sample (and be empty for
/// siso, which is AWGN-only). Noise is drawn from noise_stream at level n0.
AeForward ae_forward(const AeSystem& sys,
                     const std::vector<std::size_t>& messages,
                     const std::vector<ComplexMatrix>& channels, double n0,
                     RngStream& noise_stream);

struct AeGradients {
    Gradients tx;
    std::vector<Gradients> rx;
};

AeGradients ae_backward(const AeSystem& sys, const AeForward& fwd);

/// Argmax decisions per receiver: one row of joint decisions for single-
/// receiver systems, one row per user for mu_mimo.
std::vector<std::vector<std::size_t>> ae_decide(const AeSystem& sys,
                                                const std::vector<std::size_t>& messages,
                                                const std::vector<ComplexMatrix>& channels,
                                                double n0, RngStream& noise_stream);

/// Adam on all networks jointly, fresh channels and noise every update at the
/// fixed training SNR. Returns the loss trace, one value per update. Throws
/// DivergenceError if the loss, or any activation after the first step, goes
/// non-finite.
std::vector<double> train(AeSystem& sys, const TrainConfig& config);

/// Reads the learned constellation off a SISO transmitter, renormalized
/// exactly over the m codebook points.
Constellation extract_siso_constellation(const AeSystem& sys);

/// Trains the SISO system over AWGN and extracts its constellation.
Constellation train_siso_shaping(std::size_t m, const TrainConfig& config);

/// The open-loop transmitter evaluated on every one-hot input, with the
/// power constraint enforced exactly over the finite codebook instead of a
/// batch estimate: (1/M^L)·Σ‖X‖_F² = n_b·p_t.
std::vector<ComplexMatrix> extract_openloop_codebook(const AeSystem& sys);

/// Scatter rows `message,antenna,slot,re,im` for codebook plots.
void write_codebook_scatter(const std::vector<ComplexMatrix>& codebook,
                            const std::string& path);

/// Loss trace rows `update,loss`.
void write_loss_trace(const std::vector<double>& trace, const std::string& path);

/// Container layout on disk: transmitter first, then receiver(s).
void save_system(const AeSystem& sys, const std::string& path);
AeSystem load_system(SystemKind kind, std::size_t m, const std::string& path);

} // namespace mimoae
