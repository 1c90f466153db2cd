#pragma once

#include "mimoae/linalg.hpp"
#include "mimoae/rng.hpp"

namespace mimoae {

/// Flat Rayleigh channel held fixed for a block of symbol slots.
struct ChannelRealization {
    ComplexMatrix h;           // n_r × n_t complex gains
    std::size_t block_length;  // slots the realization covers
};

/// Noise level bookkeeping. Only the ratio P_T/N0 is physical; total transmit
/// power defaults to 1 throughout.
struct NoiseConfig {
    double n0;     // noise power per complex dimension, >= 0 (0 = noiseless)
    double snr_db; // 10·log10(p_t/n0), informational when n0 = 0

    static NoiseConfig from_snr_db(double snr_db, double p_t = 1.0);
    static NoiseConfig noiseless();
};

double snr_db_to_n0(double snr_db, double p_t);

/// i.i.d. CN(0, 1) entries, one realization per block.
ChannelRealization sample_channel(RngStream& stream, std::size_t n_r,
                                  std::size_t n_t, std::size_t block_length);

/// Y = H·X + N with vec(N) ~ CN(0, n0·I). X is n_t × slots, slots up to
/// block_length.
ComplexMatrix apply(const ChannelRealization& ch, const ComplexMatrix& x,
                    const NoiseConfig& noise, RngStream& stream);

} // namespace mimoae
