#include "mimoae/eval.hpp"

#include "mimoae/channel.hpp"
#include "mimoae/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <thread>

namespace mimoae {
namespace {

constexpr std::size_t kChunkBlocks = 1024;
constexpr std::uint64_t kWaveChunks = 8;

void run_wave(const Transceiver& tx, double snr_db, std::uint64_t seed,
              std::uint64_t point_index, std::uint64_t first_chunk, int threads,
              std::vector<ChunkCount>& out) {
    auto run_chunk = [&](std::uint64_t w) {
        RngStream stream(seed, (point_index << 32) | (first_chunk + w));
        out[w] = tx(kChunkBlocks, snr_db, stream);
    };
    if (threads <= 1) {
        for (std::uint64_t w = 0; w < kWaveChunks; ++w) run_chunk(w);
        return;
    }
    std::size_t nworkers = std::min<std::size_t>(threads, kWaveChunks);
    std::vector<std::thread> workers;
    for (std::size_t t = 0; t < nworkers; ++t)
        workers.emplace_back([&, t] {
            for (std::uint64_t w = t; w < kWaveChunks; w += nworkers) run_chunk(w);
        });
    for (auto& th : workers) th.join();
}

} // namespace

SerPoint ser_point(const Transceiver& tx, double snr_db,
                   const StoppingRule& rule, std::uint64_t seed,
                   std::uint64_t point_index, int threads) {
    if (rule.min_errors < 1 || rule.max_symbols < 1)
        throw InvalidInputError("ser_point: stopping rule must be >= 1");
    std::uint64_t slots = 0, errors = 0, chunk = 0;
    std::vector<ChunkCount> wave(kWaveChunks);
    while (slots < rule.max_symbols && errors < rule.min_errors) {
        run_wave(tx, snr_db, seed, point_index, chunk, threads, wave);
        for (const ChunkCount& c : wave) {
            slots += c.slots;
            errors += c.errors;
        }
        chunk += kWaveChunks;
    }
    return {snr_db, slots ? double(errors) / double(slots) : 0.0, slots, errors};
}

SerCurve ser_sweep(const Transceiver& tx, std::vector<double> snrs,
                   const StoppingRule& rule, std::uint64_t seed,
                   const std::string& system_tag, int threads) {
    if (snrs.empty()) throw InvalidInputError("ser_sweep: empty SNR list");
    std::sort(snrs.begin(), snrs.end());
    SerCurve curve;
    curve.system = system_tag;
    curve.seed = seed;
    for (std::size_t p = 0; p < snrs.size(); ++p)
        curve.points.push_back(
            ser_point(tx, snrs[p], rule, seed, std::uint64_t(p), threads));
    return curve;
}

namespace {

void write_point(std::ofstream& f, const SerPoint& p) {
    char line[128];
    std::snprintf(line, sizeof line, "%.17g,%.17g,%llu,%llu\n", p.snr_db, p.ser,
                  (unsigned long long)p.symbols, (unsigned long long)p.errors);
    f << line;
}

} // namespace

void write_curve(const SerCurve& curve, const std::string& path) {
    std::ofstream f(path);
    if (!f) throw FormatError("cannot open '" + path + "' for writing");
    f << "snr_db,ser,num_symbols,num_errors\n";
    for (const SerPoint& p : curve.points) write_point(f, p);
    if (!f) throw FormatError("write to '" + path + "' failed");
}

void write_curves(const std::vector<SerCurve>& curves, const std::string& path) {
    std::ofstream f(path);
    if (!f) throw FormatError("cannot open '" + path + "' for writing");
    f << "scheme,snr_db,ser,num_symbols,num_errors\n";
    char line[160];
    for (const SerCurve& c : curves)
        for (const SerPoint& p : c.points) {
            std::snprintf(line, sizeof line, "%s,%.17g,%.17g,%llu,%llu\n",
                          c.system.c_str(), p.snr_db, p.ser,
                          (unsigned long long)p.symbols,
                          (unsigned long long)p.errors);
            f << line;
        }
    if (!f) throw FormatError("write to '" + path + "' failed");
}

Transceiver make_awgn_transceiver(Constellation c) {
    return [c = std::move(c)](std::size_t blocks, double snr_db,
                              RngStream& stream) -> ChunkCount {
        const double gamma = std::pow(10.0, snr_db / 10.0);
        const double g = std::sqrt(gamma);
        ChunkCount count;
        for (std::size_t b = 0; b < blocks; ++b) {
            std::size_t label = stream.uniform_int(c.size());
            cplx y = g * c.points()[label] + stream.complex_gaussian();
            if (detect(c, y, g) != label) ++count.errors;
            ++count.slots;
        }
        return count;
    };
}

Transceiver make_alamouti_transceiver(Constellation c, double p_t) {
    return [c = std::move(c), p_t](std::size_t blocks, double snr_db,
                                   RngStream& stream) -> ChunkCount {
        const NoiseConfig noise = NoiseConfig::from_snr_db(snr_db, p_t);
        ChunkCount count;
        for (std::size_t b = 0; b < blocks; ++b) {
            std::size_t s1 = stream.uniform_int(c.size());
            std::size_t s2 = stream.uniform_int(c.size());
            ChannelRealization ch = sample_channel(stream, 1, 2, 2);
            ComplexMatrix x = alamouti_encode(s1, s2, c, p_t);
            ComplexMatrix y = apply(ch, x, noise, stream);
            auto [d1, d2] = alamouti_ml_detect(y, ch.h, c, p_t, noise.n0);
            count.errors += (d1 != s1) + (d2 != s2);
            count.slots += 2;
        }
        return count;
    };
}

Transceiver make_svd_qpsk_transceiver(double p_t) {
    Allocation alloc = equal_power_qpsk(2, p_t);
    return [alloc = std::move(alloc), p_t](std::size_t blocks, double snr_db,
                                           RngStream& stream) -> ChunkCount {
        const double n0 = snr_db_to_n0(snr_db, p_t);
        const std::size_t m = alloc.total_size();
        ChunkCount count;
        for (std::size_t b = 0; b < blocks; ++b) {
            std::size_t joint = stream.uniform_int(m);
            std::vector<std::size_t> labels = split_message(joint, alloc);
            ChannelRealization ch = sample_channel(stream, 2, 2, 1);
            std::vector<std::size_t> det =
                svd_roundtrip(ch.h, labels, alloc, n0, stream);
            if (det != labels) ++count.errors;
            ++count.slots;
        }
        return count;
    };
}

Transceiver make_svd_alloc_transceiver(std::size_t m, double p_t) {
    std::vector<Constellation> catalog = default_catalog();
    return [m, p_t, catalog = std::move(catalog)](
               std::size_t blocks, double snr_db,
               RngStream& stream) -> ChunkCount {
        const double n0 = snr_db_to_n0(snr_db, p_t);
        ChunkCount count;
        for (std::size_t b = 0; b < blocks; ++b) {
            std::size_t joint = stream.uniform_int(m);
            ChannelRealization ch = sample_channel(stream, 2, 2, 1);
            SvdResult dec = svd(ch.h);
            Allocation alloc =
                solve_allocation(dec.sigma, m, p_t, n0, catalog);
            std::vector<std::size_t> labels = split_message(joint, alloc);
            std::vector<std::size_t> det =
                svd_roundtrip(ch.h, labels, alloc, n0, stream);
            if (det != labels) ++count.errors;
            ++count.slots;
        }
        return count;
    };
}

Transceiver make_zf_transceiver(Constellation c, double p_t) {
    return [c = std::move(c), p_t](std::size_t blocks, double snr_db,
                                   RngStream& stream) -> ChunkCount {
        const double n0 = snr_db_to_n0(snr_db, p_t);
        ChunkCount count;
        std::vector<std::size_t> labels(2);
        for (std::size_t b = 0; b < blocks; ++b) {
            labels[0] = stream.uniform_int(c.size());
            labels[1] = stream.uniform_int(c.size());
            ChannelRealization ch = sample_channel(stream, 2, 2, 1);
            std::vector<std::size_t> det =
                zf_roundtrip(ch.h, labels, c, p_t, n0, stream);
            count.errors += (det[0] != labels[0]) + (det[1] != labels[1]);
            count.slots += 2;
        }
        return count;
    };
}

namespace {

std::size_t argmax_row(const double* row, std::size_t n) {
    std::size_t best = 0;
    for (std::size_t j = 1; j < n; ++j)
        if (row[j] > row[best]) best = j;
    return best;
}

ChunkCount ae_siso_chunk(const AeSystem& sys, const std::vector<cplx>& codebook,
                         std::size_t blocks, double n0, RngStream& stream) {
    const std::size_t m = sys.m;
    std::vector<std::size_t> msgs(blocks);
    std::vector<double> rx_in(blocks * 2);
    const double sigma = std::sqrt(n0);
    for (std::size_t b = 0; b < blocks; ++b) {
        msgs[b] = stream.uniform_int(m);
        cplx y = codebook[msgs[b]] + sigma * stream.complex_gaussian();
        rx_in[2 * b] = y.real();
        rx_in[2 * b + 1] = y.imag();
    }
    ForwardPass pass = forward(sys.rx[0], rx_in, blocks);
    ChunkCount count;
    for (std::size_t b = 0; b < blocks; ++b) {
        if (argmax_row(pass.output().data() + b * m, m) != msgs[b]) ++count.errors;
        ++count.slots;
    }
    return count;
}

ChunkCount ae_open_loop_chunk(const AeSystem& sys,
                              const std::vector<ComplexMatrix>& codebook,
                              std::size_t blocks, double n0, RngStream& stream) {
    const std::size_t alphabet = codebook.size();
    const std::size_t rx_in_dim = sys.rx[0].input_dim();
    const std::size_t obs_dim = 2 * sys.n_r * sys.n_b;
    const NoiseConfig noise{n0, 0.0};
    std::vector<std::size_t> msgs(blocks);
    std::vector<double> rx_in(blocks * rx_in_dim);
    for (std::size_t b = 0; b < blocks; ++b) {
        msgs[b] = stream.uniform_int(alphabet);
        ChannelRealization ch = sample_channel(stream, sys.n_r, sys.n_t, sys.n_b);
        ComplexMatrix y = apply(ch, codebook[msgs[b]], noise, stream);
        double* row = rx_in.data() + b * rx_in_dim;
        to_real_composite(y, row);
        to_real_composite(ch.h, row + obs_dim);
    }
    ForwardPass pass = forward(sys.rx[0], rx_in, blocks);
    ChunkCount count;
    for (std::size_t b = 0; b < blocks; ++b) {
        std::size_t det = argmax_row(pass.output().data() + b * alphabet, alphabet);
        std::vector<std::size_t> want = message_digits(msgs[b], sys.m, sys.l);
        std::vector<std::size_t> got = message_digits(det, sys.m, sys.l);
        for (std::size_t s = 0; s < sys.l; ++s)
            if (want[s] != got[s]) ++count.errors;
        count.slots += sys.l;
    }
    return count;
}

ChunkCount ae_csi_chunk(const AeSystem& sys, std::size_t blocks, double n0,
                        RngStream& stream) {
    const std::size_t alphabet = message_alphabet(sys);
    std::vector<std::size_t> msgs(blocks);
    for (auto& m : msgs) m = stream.uniform_int(alphabet);
    std::vector<ComplexMatrix> chans;
    chans.reserve(blocks);
    for (std::size_t b = 0; b < blocks; ++b)
        chans.push_back(sample_channel(stream, sys.n_r, sys.n_t, sys.n_b).h);
    std::vector<std::vector<std::size_t>> dec =
        ae_decide(sys, msgs, chans, n0, stream);
    ChunkCount count;
    if (sys.kind == SystemKind::mu_mimo) {
        for (std::size_t b = 0; b < blocks; ++b) {
            std::vector<std::size_t> want = message_digits(msgs[b], sys.m, sys.n_r);
            for (std::size_t u = 0; u < sys.n_r; ++u)
                if (dec[u][b] != want[u]) ++count.errors;
            count.slots += sys.n_r;
        }
    } else {
        for (std::size_t b = 0; b < blocks; ++b) {
            if (dec[0][b] != msgs[b]) ++count.errors;
            ++count.slots;
        }
    }
    return count;
}

} // namespace

Transceiver make_ae_transceiver(std::shared_ptr<const AeSystem> sys) {
    if (!sys) throw InvalidInputError("make_ae_transceiver: null system");
    switch (sys->kind) {
        case SystemKind::siso: {
            auto codebook = std::make_shared<std::vector<cplx>>(
                extract_siso_constellation(*sys).points());
            return [sys, codebook](std::size_t blocks, double snr_db,
                                   RngStream& stream) {
                return ae_siso_chunk(*sys, *codebook,
                                     blocks, snr_db_to_n0(snr_db, sys->p_t),
                                     stream);
            };
        }
        case SystemKind::open_loop: {
            auto codebook = std::make_shared<std::vector<ComplexMatrix>>(
                extract_openloop_codebook(*sys));
            return [sys, codebook](std::size_t blocks, double snr_db,
                                   RngStream& stream) {
                return ae_open_loop_chunk(*sys, *codebook, blocks,
                                          snr_db_to_n0(snr_db, sys->p_t), stream);
            };
        }
        case SystemKind::closed_loop:
        case SystemKind::mu_mimo:
            return [sys](std::size_t blocks, double snr_db, RngStream& stream) {
                return ae_csi_chunk(*sys, blocks, snr_db_to_n0(snr_db, sys->p_t),
                                    stream);
            };
    }
    throw InvalidInputError("make_ae_transceiver: unknown system kind");
}

} // namespace mimoae
