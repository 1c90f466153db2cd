#include "mimoae/nn.hpp"

#include "mimoae/errors.hpp"

#include <cblas.h>

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>

static_assert(std::endian::native == std::endian::little,
              "model file I/O assumes a little-endian host");

namespace mimoae {
namespace {

void gemm(bool trans_a, bool trans_b, std::size_t m, std::size_t n,
          std::size_t k, const double* a, std::size_t lda, const double* b,
          std::size_t ldb, double* c, std::size_t ldc) {
    cblas_dgemm(CblasRowMajor, trans_a ? CblasTrans : CblasNoTrans,
                trans_b ? CblasTrans : CblasNoTrans, int(m), int(n), int(k),
                1.0, a, int(lda), b, int(ldb), 0.0, c, int(ldc));
}

void check_model(const MlpModel& model) {
    if (model.layers.empty()) throw InvalidInputError("model has no layers");
    for (std::size_t l = 0; l < model.layers.size(); ++l) {
        const Layer& lay = model.layers[l];
        if (lay.in < 1 || lay.out < 1)
            throw InvalidInputError("layer with empty dimension");
        if (lay.w.size() != lay.in * lay.out || lay.b.size() != lay.out)
            throw InvalidInputError("layer parameter shapes inconsistent");
        if (lay.act == Activation::softmax && l + 1 != model.layers.size())
            throw InvalidInputError("softmax allowed only on the final layer");
        if (l > 0 && model.layers[l - 1].out != lay.in)
            throw InvalidInputError("layer dimensions do not chain");
    }
}

} // namespace

MlpModel make_mlp(const std::vector<std::size_t>& dims, Activation final_act) {
    if (dims.size() < 2) throw InvalidInputError("make_mlp: need at least in/out");
    MlpModel m;
    for (std::size_t l = 0; l + 1 < dims.size(); ++l) {
        Layer lay;
        lay.in = dims[l];
        lay.out = dims[l + 1];
        lay.act = (l + 2 < dims.size()) ? Activation::relu : final_act;
        lay.w.assign(lay.in * lay.out, 0.0);
        lay.b.assign(lay.out, 0.0);
        m.layers.push_back(std::move(lay));
    }
    check_model(m);
    return m;
}

void he_init(MlpModel& model, RngStream& stream) {
    for (Layer& lay : model.layers) {
        double var = (lay.act == Activation::relu ? 2.0 : 1.0) / double(lay.in);
        // Softmax outputs start close to uniform so the cross entropy opens
        // at ln(alphabet); full-scale logits would bias it upward by half
        // their variance.
        if (lay.act == Activation::softmax) var *= 0.01;
        double sd = std::sqrt(var);
        for (double& w : lay.w) w = sd * stream.normal();
        for (double& b : lay.b) b = 0.0;
    }
}

ForwardPass forward(const MlpModel& model, const std::vector<double>& x,
                    std::size_t batch) {
    check_model(model);
    if (batch < 1) throw InvalidInputError("forward: empty batch");
    if (x.size() != batch * model.input_dim())
        throw InvalidInputError("forward: input size does not match model");
    for (double v : x)
        if (!std::isfinite(v)) throw InvalidInputError("forward: non-finite input");

    ForwardPass pass;
    pass.batch = batch;
    pass.acts.reserve(model.layers.size() + 1);
    pass.acts.push_back(x);
    for (const Layer& lay : model.layers) {
        const std::vector<double>& in = pass.acts.back();
        std::vector<double> out(batch * lay.out);
        gemm(false, false, batch, lay.out, lay.in, in.data(), lay.in,
             lay.w.data(), lay.out, out.data(), lay.out);
        for (std::size_t r = 0; r < batch; ++r)
            for (std::size_t j = 0; j < lay.out; ++j) out[r * lay.out + j] += lay.b[j];
        switch (lay.act) {
            case Activation::relu:
                for (double& v : out) v = v > 0.0 ? v : 0.0;
                break;
            case Activation::linear:
                break;
            case Activation::softmax:
                for (std::size_t r = 0; r < batch; ++r) {
                    double* row = out.data() + r * lay.out;
                    double mx = row[0];
                    for (std::size_t j = 1; j < lay.out; ++j)
                        mx = std::max(mx, row[j]);
                    double sum = 0.0;
                    for (std::size_t j = 0; j < lay.out; ++j) {
                        row[j] = std::exp(row[j] - mx);
                        sum += row[j];
                    }
                    for (std::size_t j = 0; j < lay.out; ++j) row[j] /= sum;
                }
                break;
        }
        pass.acts.push_back(std::move(out));
    }
    return pass;
}

double cross_entropy(const std::vector<double>& probs, std::size_t batch,
                     std::size_t classes,
                     const std::vector<std::size_t>& labels) {
    if (probs.size() != batch * classes || labels.size() != batch)
        throw InvalidInputError("cross_entropy: shape mismatch");
    double loss = 0.0;
    for (std::size_t r = 0; r < batch; ++r) {
        if (labels[r] >= classes)
            throw InvalidInputError("cross_entropy: label out of range");
        double p = probs[r * classes + labels[r]];
        loss -= std::log(std::max(p, 1e-30));
    }
    return loss / double(batch);
}

namespace {

/// Shared reverse chain. grad enters as dL/d(post-activation) of the last
/// layer, or as dL/d(pre-activation) when the softmax+CE head was fused.
Gradients backward_from(const MlpModel& model, const ForwardPass& pass,
                        std::vector<double> grad, bool grad_at_preact) {
    const std::size_t batch = pass.batch;
    const std::size_t nl = model.layers.size();
    if (pass.acts.size() != nl + 1)
        throw InvalidInputError("backward: pass does not match model");

    Gradients g;
    g.dw.resize(nl);
    g.db.resize(nl);
    for (std::size_t l = nl; l-- > 0;) {
        const Layer& lay = model.layers[l];
        const std::vector<double>& out = pass.acts[l + 1];
        const std::vector<double>& in = pass.acts[l];
        if (grad.size() != batch * lay.out)
            throw InvalidInputError("backward: gradient shape mismatch");

        if (!(l == nl - 1 && grad_at_preact)) {
            switch (lay.act) {
                case Activation::relu:
                    for (std::size_t i = 0; i < grad.size(); ++i)
                        if (out[i] <= 0.0) grad[i] = 0.0;
                    break;
                case Activation::linear:
                    break;
                case Activation::softmax:
                    for (std::size_t r = 0; r < batch; ++r) {
                        const double* p = out.data() + r * lay.out;
                        double* gr = grad.data() + r * lay.out;
                        double dot = 0.0;
                        for (std::size_t j = 0; j < lay.out; ++j)
                            dot += gr[j] * p[j];
                        for (std::size_t j = 0; j < lay.out; ++j)
                            gr[j] = p[j] * (gr[j] - dot);
                    }
                    break;
            }
        }

        g.db[l].assign(lay.out, 0.0);
        for (std::size_t r = 0; r < batch; ++r)
            for (std::size_t j = 0; j < lay.out; ++j)
                g.db[l][j] += grad[r * lay.out + j];

        g.dw[l].assign(lay.in * lay.out, 0.0);
        gemm(true, false, lay.in, lay.out, batch, in.data(), lay.in, grad.data(),
             lay.out, g.dw[l].data(), lay.out);

        std::vector<double> prev(batch * lay.in);
        gemm(false, true, batch, lay.in, lay.out, grad.data(), lay.out,
             lay.w.data(), lay.out, prev.data(), lay.in);
        grad = std::move(prev);
    }
    g.dx = std::move(grad);
    return g;
}

} // namespace

Gradients backward(const MlpModel& model, const ForwardPass& pass,
                   const std::vector<double>& grad_output) {
    return backward_from(model, pass, grad_output, false);
}

Gradients backward_softmax_ce(const MlpModel& model, const ForwardPass& pass,
                              const std::vector<std::size_t>& labels) {
    if (model.layers.back().act != Activation::softmax)
        throw InvalidInputError("backward_softmax_ce: final layer is not softmax");
    const std::size_t classes = model.output_dim();
    const std::size_t batch = pass.batch;
    if (labels.size() != batch)
        throw InvalidInputError("backward_softmax_ce: label count mismatch");
    std::vector<double> grad = pass.output();
    double inv_b = 1.0 / double(batch);
    for (std::size_t r = 0; r < batch; ++r) {
        if (labels[r] >= classes)
            throw InvalidInputError("backward_softmax_ce: label out of range");
        grad[r * classes + labels[r]] -= 1.0;
    }
    for (double& v : grad) v *= inv_b;
    return backward_from(model, pass, std::move(grad), true);
}

PowerNorm power_normalize(std::vector<double>& x, std::size_t batch, double p_t,
                          std::size_t slots) {
    if (batch < 1 || slots < 1 || !(p_t > 0.0))
        throw InvalidInputError("power_normalize: bad batch/slots/p_t");
    double sum_sq = 0.0;
    for (double v : x) sum_sq += v * v;
    if (sum_sq <= 0.0)
        throw DegenerateBatchError("power_normalize: all-zero batch");
    double scale = std::sqrt(double(batch) * double(slots) * p_t / sum_sq);
    for (double& v : x) v *= scale;
    return {scale, sum_sq};
}

void power_normalize_backward(const std::vector<double>& x_pre,
                              const PowerNorm& pn, std::vector<double>& grad) {
    if (x_pre.size() != grad.size())
        throw InvalidInputError("power_normalize_backward: shape mismatch");
    double dot = 0.0;
    for (std::size_t i = 0; i < grad.size(); ++i) dot += grad[i] * x_pre[i];
    double coupling = pn.scale * dot / pn.sum_sq;
    for (std::size_t i = 0; i < grad.size(); ++i)
        grad[i] = pn.scale * grad[i] - coupling * x_pre[i];
}

AdamState make_adam(const MlpModel& model, double lr) {
    if (!(lr > 0.0)) throw InvalidInputError("make_adam: lr must be positive");
    AdamState s;
    s.lr = lr;
    for (const Layer& lay : model.layers) {
        s.mw.emplace_back(lay.w.size(), 0.0);
        s.vw.emplace_back(lay.w.size(), 0.0);
        s.mb.emplace_back(lay.b.size(), 0.0);
        s.vb.emplace_back(lay.b.size(), 0.0);
    }
    return s;
}

namespace {

void adam_update(std::vector<double>& p, const std::vector<double>& g,
                 std::vector<double>& m, std::vector<double>& v,
                 const AdamState& s, double bc1, double bc2) {
    for (std::size_t i = 0; i < p.size(); ++i) {
        m[i] = s.beta1 * m[i] + (1.0 - s.beta1) * g[i];
        v[i] = s.beta2 * v[i] + (1.0 - s.beta2) * g[i] * g[i];
        double mhat = m[i] / bc1;
        double vhat = v[i] / bc2;
        p[i] -= s.lr * mhat / (std::sqrt(vhat) + s.eps);
    }
}

} // namespace

void adam_step(MlpModel& model, const Gradients& g, AdamState& state) {
    if (g.dw.size() != model.layers.size())
        throw InvalidInputError("adam_step: gradient/model mismatch");
    ++state.step;
    double bc1 = 1.0 - std::pow(state.beta1, double(state.step));
    double bc2 = 1.0 - std::pow(state.beta2, double(state.step));
    for (std::size_t l = 0; l < model.layers.size(); ++l) {
        adam_update(model.layers[l].w, g.dw[l], state.mw[l], state.vw[l], state,
                    bc1, bc2);
        adam_update(model.layers[l].b, g.db[l], state.mb[l], state.vb[l], state,
                    bc1, bc2);
    }
}

std::size_t param_count(const MlpModel& model) {
    std::size_t n = 0;
    for (const Layer& lay : model.layers) n += lay.w.size() + lay.b.size();
    return n;
}

namespace {

double* param_ptr(MlpModel& model, std::size_t i) {
    for (Layer& lay : model.layers) {
        if (i < lay.w.size()) return &lay.w[i];
        i -= lay.w.size();
        if (i < lay.b.size()) return &lay.b[i];
        i -= lay.b.size();
    }
    throw InvalidInputError("parameter index out of range");
}

} // namespace

double get_param(const MlpModel& model, std::size_t i) {
    return *param_ptr(const_cast<MlpModel&>(model), i);
}

void set_param(MlpModel& model, std::size_t i, double v) { *param_ptr(model, i) = v; }

namespace {

constexpr char kMagic[8] = {'M', 'I', 'M', 'O', 'A', 'E', '0', '1'};
constexpr std::size_t kMaxDim = 1u << 20;

void write_model_stream(std::ostream& f, const MlpModel& model) {
    f.write(kMagic, 8);
    std::uint32_t nl = std::uint32_t(model.layers.size());
    f.write(reinterpret_cast<const char*>(&nl), 4);
    for (const Layer& lay : model.layers) {
        std::uint32_t in = std::uint32_t(lay.in), out = std::uint32_t(lay.out);
        std::uint8_t act = std::uint8_t(lay.act);
        f.write(reinterpret_cast<const char*>(&in), 4);
        f.write(reinterpret_cast<const char*>(&out), 4);
        f.write(reinterpret_cast<const char*>(&act), 1);
    }
    for (const Layer& lay : model.layers) {
        f.write(reinterpret_cast<const char*>(lay.w.data()),
                std::streamsize(lay.w.size() * 8));
        f.write(reinterpret_cast<const char*>(lay.b.data()),
                std::streamsize(lay.b.size() * 8));
    }
}

[[noreturn]] void bad_format(const std::string& path, std::size_t offset,
                             const std::string& what) {
    throw FormatError(path + ": " + what + " at byte " + std::to_string(offset));
}

MlpModel read_model_stream(std::istream& f, const std::string& path,
                           std::size_t& offset) {
    auto read_raw = [&](void* dst, std::size_t n, const char* what) {
        f.read(reinterpret_cast<char*>(dst), std::streamsize(n));
        if (std::size_t(f.gcount()) != n) bad_format(path, offset, what);
        offset += n;
    };
    char magic[8];
    read_raw(magic, 8, "truncated magic");
    if (std::memcmp(magic, kMagic, 8) != 0)
        bad_format(path, offset - 8, "bad magic");
    std::uint32_t nl = 0;
    read_raw(&nl, 4, "truncated layer count");
    if (nl < 1 || nl > 64) bad_format(path, offset - 4, "implausible layer count");
    MlpModel model;
    for (std::uint32_t l = 0; l < nl; ++l) {
        std::uint32_t in = 0, out = 0;
        std::uint8_t act = 0;
        read_raw(&in, 4, "truncated layer header");
        read_raw(&out, 4, "truncated layer header");
        read_raw(&act, 1, "truncated layer header");
        if (in < 1 || in > kMaxDim || out < 1 || out > kMaxDim)
            bad_format(path, offset - 9, "layer dimension out of range");
        if (act > 2) bad_format(path, offset - 1, "unknown activation code");
        Layer lay;
        lay.in = in;
        lay.out = out;
        lay.act = Activation(act);
        model.layers.push_back(std::move(lay));
    }
    for (Layer& lay : model.layers) {
        lay.w.resize(lay.in * lay.out);
        lay.b.resize(lay.out);
        read_raw(lay.w.data(), lay.w.size() * 8, "truncated weights");
        read_raw(lay.b.data(), lay.b.size() * 8, "truncated biases");
    }
    try {
        check_model(model);
    } catch (const InvalidInputError& e) {
        bad_format(path, offset, e.what());
    }
    for (const Layer& lay : model.layers) {
        for (double w : lay.w)
            if (!std::isfinite(w)) bad_format(path, offset, "non-finite weight");
        for (double b : lay.b)
            if (!std::isfinite(b)) bad_format(path, offset, "non-finite bias");
    }
    return model;
}

} // namespace

void save_model(const MlpModel& model, const std::string& path) {
    check_model(model);
    std::ofstream f(path, std::ios::binary);
    if (!f) throw FormatError("cannot open '" + path + "' for writing");
    write_model_stream(f, model);
    if (!f) throw FormatError("write to '" + path + "' failed");
}

MlpModel load_model(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw FormatError("cannot open '" + path + "'");
    std::size_t offset = 0;
    MlpModel m = read_model_stream(f, path, offset);
    if (f.peek() != std::char_traits<char>::eof())
        bad_format(path, offset, "trailing bytes after model");
    return m;
}

void save_model_container(const std::vector<MlpModel>& models,
                          const std::string& path) {
    if (models.empty())
        throw InvalidInputError("save_model_container: no models");
    std::ofstream f(path, std::ios::binary);
    if (!f) throw FormatError("cannot open '" + path + "' for writing");
    std::uint32_t n = std::uint32_t(models.size());
    f.write(reinterpret_cast<const char*>(&n), 4);
    for (const MlpModel& m : models) {
        check_model(m);
        write_model_stream(f, m);
    }
    if (!f) throw FormatError("write to '" + path + "' failed");
}

std::vector<MlpModel> load_model_container(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw FormatError("cannot open '" + path + "'");
    std::uint32_t n = 0;
    f.read(reinterpret_cast<char*>(&n), 4);
    if (f.gcount() != 4) bad_format(path, 0, "truncated model count");
    if (n < 1 || n > 16) bad_format(path, 0, "implausible model count");
    std::size_t offset = 4;
    std::vector<MlpModel> models;
    for (std::uint32_t i = 0; i < n; ++i)
        models.push_back(read_model_stream(f, path, offset));
    if (f.peek() != std::char_traits<char>::eof())
        bad_format(path, offset, "trailing bytes after container");
    return models;
}

} // namespace mimoae
