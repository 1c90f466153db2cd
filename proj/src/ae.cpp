#include "mimoae/ae.hpp"

#include "mimoae/errors.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

namespace mimoae {

std::string to_string(SystemKind kind) {
    switch (kind) {
        case SystemKind::siso: return "siso";
        case SystemKind::open_loop: return "open-loop";
        case SystemKind::closed_loop: return "closed-loop";
        case SystemKind::mu_mimo: return "mu-mimo";
    }
    throw InvalidInputError("to_string: unknown system kind");
}

SystemKind system_kind_from_string(const std::string& name) {
    if (name == "siso") return SystemKind::siso;
    if (name == "open-loop") return SystemKind::open_loop;
    if (name == "closed-loop") return SystemKind::closed_loop;
    if (name == "mu-mimo") return SystemKind::mu_mimo;
    throw InvalidInputError("unknown system '" + name + "'");
}

std::size_t message_alphabet(const AeSystem& sys) {
    auto power = [](std::size_t base, std::size_t e) {
        std::size_t a = 1;
        while (e--) a *= base;
        return a;
    };
    switch (sys.kind) {
        case SystemKind::siso:
        case SystemKind::closed_loop:
            return sys.m;
        case SystemKind::open_loop:
            return power(sys.m, sys.l);
        case SystemKind::mu_mimo:
            return power(sys.m, sys.n_r);
    }
    throw InvalidInputError("message_alphabet: unknown system kind");
}

std::vector<std::size_t> message_digits(std::size_t joint, std::size_t m,
                                        std::size_t count) {
    std::vector<std::size_t> digits(count);
    for (std::size_t i = count; i-- > 0;) {
        digits[i] = joint % m;
        joint /= m;
    }
    if (joint != 0) throw InvalidInputError("message_digits: joint message too large");
    return digits;
}

std::size_t message_join(const std::vector<std::size_t>& digits, std::size_t m) {
    std::size_t joint = 0;
    for (std::size_t d : digits) {
        if (d >= m) throw InvalidInputError("message_join: digit out of range");
        joint = joint * m + d;
    }
    return joint;
}

namespace {

std::vector<std::size_t> widths(std::size_t in, std::size_t hidden,
                                std::size_t depth, std::size_t out) {
    std::vector<std::size_t> dims{in};
    dims.insert(dims.end(), depth, hidden);
    dims.push_back(out);
    return dims;
}

AeSystem make_geometry(SystemKind kind, std::size_t m) {
    if (m < 2) throw InvalidInputError("build_system: m must be >= 2");
    AeSystem sys;
    sys.kind = kind;
    sys.m = m;
    switch (kind) {
        case SystemKind::siso: {
            sys.n_t = sys.n_r = sys.n_b = sys.l = 1;
            sys.tx = make_mlp(widths(m, 64, 2, 2), Activation::linear);
            sys.rx.push_back(make_mlp(widths(2, 64, 2, m), Activation::softmax));
            break;
        }
        case SystemKind::open_loop: {
            sys.n_t = 2;
            sys.n_r = 1;
            sys.n_b = 2;
            sys.l = 2;
            std::size_t alphabet = m * m;
            std::size_t tx_depth = m >= 16 ? 5 : 2;
            std::size_t rx_depth = m >= 16 ? 5 : 3;
            sys.tx = make_mlp(widths(alphabet, 256, tx_depth, 8), Activation::linear);
            sys.rx.push_back(
                make_mlp(widths(8, 2048, rx_depth, alphabet), Activation::softmax));
            break;
        }
        case SystemKind::closed_loop: {
            sys.n_t = 2;
            sys.n_r = 2;
            sys.n_b = 1;
            sys.l = 1;
            sys.tx = make_mlp(widths(m + 8, 64, 3, 4), Activation::linear);
            sys.rx.push_back(make_mlp(widths(12, 512, 3, m), Activation::softmax));
            break;
        }
        case SystemKind::mu_mimo: {
            sys.n_t = 2;
            sys.n_r = 2;
            sys.n_b = 1;
            sys.l = 1;
            sys.tx = make_mlp(widths(m * m + 8, 512, 3, 4), Activation::linear);
            for (std::size_t u = 0; u < sys.n_r; ++u)
                sys.rx.push_back(make_mlp(widths(6, 256, 3, m), Activation::softmax));
            break;
        }
    }
    return sys;
}

} // namespace

AeSystem build_system(SystemKind kind, std::size_t m, RngStream& init_stream) {
    AeSystem sys = make_geometry(kind, m);
    he_init(sys.tx, init_stream);
    for (MlpModel& rx : sys.rx) he_init(rx, init_stream);
    return sys;
}

AeForward ae_forward(const AeSystem& sys,
                     const std::vector<std::size_t>& messages,
                     const std::vector<ComplexMatrix>& channels, double n0,
                     RngStream& noise_stream) {
    const std::size_t batch = messages.size();
    if (batch == 0) throw InvalidInputError("ae_forward: empty batch");
    const std::size_t alphabet = message_alphabet(sys);
    const bool has_channel = sys.kind != SystemKind::siso;
    if (has_channel) {
        if (channels.size() != batch)
            throw InvalidInputError("ae_forward: one channel per sample required");
        for (const ComplexMatrix& h : channels)
            if (h.rows() != sys.n_r || h.cols() != sys.n_t)
                throw InvalidInputError("ae_forward: channel shape mismatch");
    } else if (!channels.empty()) {
        throw InvalidInputError("ae_forward: siso runs over AWGN, no channels");
    }
    for (std::size_t msg : messages)
        if (msg >= alphabet)
            throw InvalidInputError("ae_forward: message out of range");
    if (n0 < 0.0) throw InvalidInputError("ae_forward: negative noise power");

    const bool tx_sees_csi =
        sys.kind == SystemKind::closed_loop || sys.kind == SystemKind::mu_mimo;
    const std::size_t csi_dim = has_channel ? 2 * sys.n_r * sys.n_t : 0;
    const std::size_t tx_in_dim = alphabet + (tx_sees_csi ? csi_dim : 0);
    if (sys.tx.input_dim() != tx_in_dim)
        throw InvalidInputError("ae_forward: transmitter does not match system");

    AeForward f;
    f.batch = batch;
    f.messages = messages;
    f.channels = channels;

    std::vector<double> tx_in(batch * tx_in_dim, 0.0);
    for (std::size_t b = 0; b < batch; ++b) {
        double* row = tx_in.data() + b * tx_in_dim;
        row[messages[b]] = 1.0;
        if (tx_sees_csi) to_real_composite(channels[b], row + alphabet);
    }
    f.tx_pass = forward(sys.tx, tx_in, batch);
    f.x_pre = f.tx_pass.output();

    std::vector<double> x_norm = f.x_pre;
    f.pn = power_normalize(x_norm, batch, sys.p_t, sys.n_b);

    const std::size_t xdim = 2 * sys.n_t * sys.n_b;
    const double sigma = std::sqrt(n0);
    f.y.reserve(batch);
    std::vector<double> xrow(xdim);
    for (std::size_t b = 0; b < batch; ++b) {
        std::copy(x_norm.begin() + b * xdim, x_norm.begin() + (b + 1) * xdim,
                  xrow.begin());
        ComplexMatrix x = from_real_composite(xrow, sys.n_t, sys.n_b);
        ComplexMatrix y = has_channel ? channels[b] * x : x;
        if (n0 > 0.0)
            for (cplx& e : y.data()) e += sigma * noise_stream.complex_gaussian();
        f.y.push_back(std::move(y));
    }

    f.loss = 0.0;
    if (sys.kind == SystemKind::mu_mimo) {
        const std::size_t rx_in_dim = 2 * sys.n_b + 2 * sys.n_t; // y_u plus row u of H
        for (std::size_t u = 0; u < sys.n_r; ++u) {
            std::vector<double> rx_in(batch * rx_in_dim);
            std::vector<std::size_t> labels(batch);
            for (std::size_t b = 0; b < batch; ++b) {
                double* row = rx_in.data() + b * rx_in_dim;
                ComplexMatrix yu(1, sys.n_b);
                for (std::size_t s = 0; s < sys.n_b; ++s) yu(0, s) = f.y[b](u, s);
                to_real_composite(yu, row);
                ComplexMatrix hu(1, sys.n_t);
                for (std::size_t c = 0; c < sys.n_t; ++c) hu(0, c) = channels[b](u, c);
                to_real_composite(hu, row + 2 * sys.n_b);
                labels[b] = message_digits(messages[b], sys.m, sys.n_r)[u];
            }
            f.rx_pass.push_back(forward(sys.rx[u], rx_in, batch));
            f.loss += cross_entropy(f.rx_pass[u].output(), batch, sys.m, labels);
            f.rx_labels.push_back(std::move(labels));
        }
    } else {
        const std::size_t obs_dim = 2 * sys.n_r * sys.n_b;
        const std::size_t rx_in_dim = obs_dim + csi_dim;
        std::vector<double> rx_in(batch * rx_in_dim);
        for (std::size_t b = 0; b < batch; ++b) {
            double* row = rx_in.data() + b * rx_in_dim;
            to_real_composite(f.y[b], row);
            if (has_channel) to_real_composite(channels[b], row + obs_dim);
        }
        f.rx_pass.push_back(forward(sys.rx[0], rx_in, batch));
        f.loss = cross_entropy(f.rx_pass[0].output(), batch, alphabet, messages);
        f.rx_labels.push_back(messages);
    }
    return f;
}

AeGradients ae_backward(const AeSystem& sys, const AeForward& f) {
    const std::size_t batch = f.batch;
    const bool has_channel = sys.kind != SystemKind::siso;
    const std::size_t xdim = 2 * sys.n_t * sys.n_b;

    AeGradients g;
    std::vector<double> grad_x(batch * xdim);
    std::vector<double> slice;
    if (sys.kind == SystemKind::mu_mimo) {
        std::vector<ComplexMatrix> gy(batch, ComplexMatrix(sys.n_r, sys.n_b));
        g.rx.resize(sys.n_r);
        for (std::size_t u = 0; u < sys.n_r; ++u) {
            g.rx[u] = backward_softmax_ce(sys.rx[u], f.rx_pass[u], f.rx_labels[u]);
            const std::size_t rx_in_dim = sys.rx[u].input_dim();
            for (std::size_t b = 0; b < batch; ++b) {
                const double* row = g.rx[u].dx.data() + b * rx_in_dim;
                for (std::size_t s = 0; s < sys.n_b; ++s)
                    gy[b](u, s) = cplx(row[s], row[sys.n_b + s]);
            }
        }
        for (std::size_t b = 0; b < batch; ++b) {
            ComplexMatrix gx = f.channels[b].adjoint() * gy[b];
            to_real_composite(gx, grad_x.data() + b * xdim);
        }
    } else {
        g.rx.resize(1);
        g.rx[0] = backward_softmax_ce(sys.rx[0], f.rx_pass[0], f.rx_labels[0]);
        const std::size_t obs_dim = 2 * sys.n_r * sys.n_b;
        const std::size_t rx_in_dim = sys.rx[0].input_dim();
        slice.resize(obs_dim);
        for (std::size_t b = 0; b < batch; ++b) {
            const double* row = g.rx[0].dx.data() + b * rx_in_dim;
            std::copy(row, row + obs_dim, slice.begin());
            ComplexMatrix gy = from_real_composite(slice, sys.n_r, sys.n_b);
            ComplexMatrix gx = has_channel ? f.channels[b].adjoint() * gy : gy;
            to_real_composite(gx, grad_x.data() + b * xdim);
        }
    }

    power_normalize_backward(f.x_pre, f.pn, grad_x);
    g.tx = backward(sys.tx, f.tx_pass, grad_x);
    return g;
}

std::vector<std::vector<std::size_t>> ae_decide(
    const AeSystem& sys, const std::vector<std::size_t>& messages,
    const std::vector<ComplexMatrix>& channels, double n0,
    RngStream& noise_stream) {
    AeForward f = ae_forward(sys, messages, channels, n0, noise_stream);
    std::vector<std::vector<std::size_t>> decisions(sys.rx.size());
    for (std::size_t u = 0; u < sys.rx.size(); ++u) {
        const std::size_t classes = sys.rx[u].output_dim();
        const std::vector<double>& probs = f.rx_pass[u].output();
        decisions[u].resize(f.batch);
        for (std::size_t b = 0; b < f.batch; ++b) {
            const double* row = probs.data() + b * classes;
            std::size_t best = 0;
            for (std::size_t j = 1; j < classes; ++j)
                if (row[j] > row[best]) best = j;
            decisions[u][b] = best;
        }
    }
    return decisions;
}

std::vector<double> train(AeSystem& sys, const TrainConfig& config) {
    if (config.updates < 1 || config.batch < 1)
        throw InvalidInputError("train: updates and batch must be >= 1");
    if (!(config.lr > 0.0)) throw InvalidInputError("train: lr must be positive");
    const double n0 = snr_db_to_n0(config.snr_db, sys.p_t);
    const std::size_t alphabet = message_alphabet(sys);
    const bool has_channel = sys.kind != SystemKind::siso;

    AdamState tx_state = make_adam(sys.tx, config.lr);
    std::vector<AdamState> rx_states;
    for (const MlpModel& rx : sys.rx) rx_states.push_back(make_adam(rx, config.lr));

    std::vector<double> trace;
    trace.reserve(config.updates);
    std::vector<std::size_t> msgs(config.batch);
    for (std::size_t k = 0; k < config.updates; ++k) {
        // Substream per update: reproducible regardless of how many draws an
        // update consumes. The high bit block keeps training streams clear of
        // evaluation streams.
        RngStream upd(config.seed, (std::uint64_t(1) << 56) + k);
        for (auto& m : msgs) m = upd.uniform_int(alphabet);
        std::vector<ComplexMatrix> chans;
        if (has_channel) {
            chans.reserve(config.batch);
            for (std::size_t b = 0; b < config.batch; ++b)
                chans.push_back(sample_channel(upd, sys.n_r, sys.n_t, sys.n_b).h);
        }
        AeForward f;
        try {
            f = ae_forward(sys, msgs, chans, n0, upd);
        } catch (const InvalidInputError&) {
            // After at least one step the only way activations go non-finite
            // is a blown-up optimizer; before any step it is a caller error.
            if (k == 0) throw;
            throw DivergenceError("training produced non-finite activations", k);
        } catch (const DegenerateBatchError&) {
            if (k == 0) throw;
            throw DivergenceError("training collapsed the transmit batch", k);
        }
        if (!std::isfinite(f.loss))
            throw DivergenceError("training loss became non-finite", k);
        trace.push_back(f.loss);
        AeGradients g = ae_backward(sys, f);
        adam_step(sys.tx, g.tx, tx_state);
        for (std::size_t u = 0; u < sys.rx.size(); ++u)
            adam_step(sys.rx[u], g.rx[u], rx_states[u]);
    }
    return trace;
}

Constellation extract_siso_constellation(const AeSystem& sys) {
    if (sys.kind != SystemKind::siso)
        throw InvalidInputError("extract_siso_constellation: siso systems only");
    const std::size_t m = sys.m;
    std::vector<double> tx_in(m * m, 0.0);
    for (std::size_t i = 0; i < m; ++i) tx_in[i * m + i] = 1.0;
    std::vector<double> flat = forward(sys.tx, tx_in, m).output();
    power_normalize(flat, m, sys.p_t, 1);
    std::vector<cplx> points(m);
    for (std::size_t i = 0; i < m; ++i)
        points[i] = cplx(flat[2 * i], flat[2 * i + 1]);
    return Constellation::custom(std::move(points), "shaped" + std::to_string(m));
}

Constellation train_siso_shaping(std::size_t m, const TrainConfig& config) {
    RngStream init(config.seed, 0);
    AeSystem sys = build_system(SystemKind::siso, m, init);
    train(sys, config);
    return extract_siso_constellation(sys);
}

std::vector<ComplexMatrix> extract_openloop_codebook(const AeSystem& sys) {
    if (sys.kind != SystemKind::open_loop)
        throw InvalidInputError("extract_openloop_codebook: open-loop systems only");
    const std::size_t alphabet = message_alphabet(sys);
    std::vector<double> tx_in(alphabet * alphabet, 0.0);
    for (std::size_t i = 0; i < alphabet; ++i) tx_in[i * alphabet + i] = 1.0;
    ForwardPass pass = forward(sys.tx, tx_in, alphabet);
    std::vector<double> flat = pass.output();
    power_normalize(flat, alphabet, sys.p_t, sys.n_b);
    const std::size_t xdim = 2 * sys.n_t * sys.n_b;
    std::vector<ComplexMatrix> codebook;
    codebook.reserve(alphabet);
    std::vector<double> row(xdim);
    for (std::size_t i = 0; i < alphabet; ++i) {
        std::copy(flat.begin() + i * xdim, flat.begin() + (i + 1) * xdim,
                  row.begin());
        codebook.push_back(from_real_composite(row, sys.n_t, sys.n_b));
    }
    return codebook;
}

void write_codebook_scatter(const std::vector<ComplexMatrix>& codebook,
                            const std::string& path) {
    std::ofstream f(path);
    if (!f) throw FormatError("cannot open '" + path + "' for writing");
    f << "message,antenna,slot,re,im\n";
    char line[96];
    for (std::size_t msg = 0; msg < codebook.size(); ++msg) {
        const ComplexMatrix& x = codebook[msg];
        for (std::size_t a = 0; a < x.rows(); ++a)
            for (std::size_t s = 0; s < x.cols(); ++s) {
                std::snprintf(line, sizeof line, "%zu,%zu,%zu,%.17g,%.17g\n", msg,
                              a, s, x(a, s).real(), x(a, s).imag());
                f << line;
            }
    }
    if (!f) throw FormatError("write to '" + path + "' failed");
}

void write_loss_trace(const std::vector<double>& trace, const std::string& path) {
    std::ofstream f(path);
    if (!f) throw FormatError("cannot open '" + path + "' for writing");
    f << "update,loss\n";
    char line[64];
    for (std::size_t k = 0; k < trace.size(); ++k) {
        std::snprintf(line, sizeof line, "%zu,%.17g\n", k, trace[k]);
        f << line;
    }
    if (!f) throw FormatError("write to '" + path + "' failed");
}

void save_system(const AeSystem& sys, const std::string& path) {
    std::vector<MlpModel> models;
    models.push_back(sys.tx);
    for (const MlpModel& rx : sys.rx) models.push_back(rx);
    save_model_container(models, path);
}

namespace {

bool same_shape(const MlpModel& a, const MlpModel& b) {
    if (a.layers.size() != b.layers.size()) return false;
    for (std::size_t l = 0; l < a.layers.size(); ++l) {
        const Layer &x = a.layers[l], &y = b.layers[l];
        if (x.in != y.in || x.out != y.out || x.act != y.act) return false;
    }
    return true;
}

} // namespace

AeSystem load_system(SystemKind kind, std::size_t m, const std::string& path) {
    AeSystem sys = make_geometry(kind, m);
    std::vector<MlpModel> models = load_model_container(path);
    if (models.size() != 1 + sys.rx.size())
        throw FormatError(path + ": expected " +
                          std::to_string(1 + sys.rx.size()) + " networks for " +
                          to_string(kind) + ", found " +
                          std::to_string(models.size()));
    if (!same_shape(models[0], sys.tx))
        throw FormatError(path + ": transmitter does not match " +
                          to_string(kind) + " m=" + std::to_string(m));
    for (std::size_t u = 0; u < sys.rx.size(); ++u)
        if (!same_shape(models[1 + u], sys.rx[u]))
            throw FormatError(path + ": receiver " + std::to_string(u) +
                              " does not match " + to_string(kind) +
                              " m=" + std::to_string(m));
    sys.tx = std::move(models[0]);
    for (std::size_t u = 0; u < sys.rx.size(); ++u)
        sys.rx[u] = std::move(models[1 + u]);
    return sys;
}

} // namespace mimoae
