#include "mimoae/channel.hpp"

#include "mimoae/errors.hpp"

#include <cmath>
#include <limits>

namespace mimoae {

double snr_db_to_n0(double snr_db, double p_t) {
    if (!(p_t > 0.0)) throw InvalidInputError("snr_db_to_n0: p_t must be positive");
    return p_t * std::pow(10.0, -snr_db / 10.0);
}

NoiseConfig NoiseConfig::from_snr_db(double snr_db, double p_t) {
    return {snr_db_to_n0(snr_db, p_t), snr_db};
}

NoiseConfig NoiseConfig::noiseless() {
    return {0.0, std::numeric_limits<double>::infinity()};
}

ChannelRealization sample_channel(RngStream& stream, std::size_t n_r,
                                  std::size_t n_t, std::size_t block_length) {
    if (n_r < 1 || n_t < 1)
        throw InvalidInputError("sample_channel: dimensions must be >= 1");
    ChannelRealization ch{ComplexMatrix(n_r, n_t), block_length};
    for (std::size_t r = 0; r < n_r; ++r)
        for (std::size_t c = 0; c < n_t; ++c)
            ch.h(r, c) = stream.complex_gaussian();
    return ch;
}

ComplexMatrix apply(const ChannelRealization& ch, const ComplexMatrix& x,
                    const NoiseConfig& noise, RngStream& stream) {
    if (x.rows() != ch.h.cols())
        throw InvalidInputError("apply: x must have n_t rows");
    if (x.cols() > ch.block_length)
        throw InvalidInputError("apply: more symbol slots than the fading block");
    if (noise.n0 < 0.0) throw InvalidInputError("apply: negative noise power");
    ComplexMatrix y = ch.h * x;
    if (noise.n0 > 0.0) {
        double sigma = std::sqrt(noise.n0);
        for (auto& e : y.data()) e += sigma * stream.complex_gaussian();
    }
    return y;
}

} // namespace mimoae
