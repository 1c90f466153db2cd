#pragma once

#include "mimoae/rng.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace mimoae {

enum class Activation : std::uint8_t { relu = 0, linear = 1, softmax = 2 };

/// One dense layer. Weights are row-major in×out so a batch forward pass is a
/// single (batch×in)·(in×out) product.
struct Layer {
    std::size_t in = 0, out = 0;
    Activation act = Activation::linear;
    std::vector<double> w; // in × out
    std::vector<double> b; // out
};

/// Feed-forward stack. Softmax is only valid as the final activation.
struct MlpModel {
    std::vector<Layer> layers;

    std::size_t input_dim() const { return layers.front().in; }
    std::size_t output_dim() const { return layers.back().out; }
};

/// Builds an MLP from a dimension chain: dims = {in, h1, …, out}. Hidden
/// layers are ReLU; the final activation is given explicitly.
MlpModel make_mlp(const std::vector<std::size_t>& dims, Activation final_act);

/// Gaussian weights with variance 2/fan_in on ReLU layers and 1/fan_in on
/// linear ones; zero biases. Softmax layers are scaled down by 100x so the
/// initial decision is near uniform.
void he_init(MlpModel& model, RngStream& stream);

/// All post-activation buffers of one forward pass, kept for backward.
/// acts[0] is the input, acts[l+1] the output of layer l; each buffer is
/// batch × dim, row-major.
struct ForwardPass {
    std::size_t batch = 0;
    std::vector<std::vector<double>> acts;

    const std::vector<double>& output() const { return acts.back(); }
};

ForwardPass forward(const MlpModel& model, const std::vector<double>& x,
                    std::size_t batch);

/// Mean over the batch of −log p[label]. Probabilities are clamped at 1e-30
/// so a confident wrong prediction yields a large finite loss.
double cross_entropy(const std::vector<double>& probs, std::size_t batch,
                     std::size_t classes, const std::vector<std::size_t>& labels);

struct Gradients {
    std::vector<std::vector<double>> dw, db; // per layer, shapes match model
    std::vector<double> dx;                  // batch × input_dim
};

/// Reverse pass from dL/d(output). Handles any final activation; for a
/// softmax head trained with cross-entropy prefer backward_softmax_ce, which
/// fuses the two into (p − onehot)/batch.
Gradients backward(const MlpModel& model, const ForwardPass& pass,
                   const std::vector<double>& grad_output);

Gradients backward_softmax_ce(const MlpModel& model, const ForwardPass& pass,
                              const std::vector<std::size_t>& labels);

/// Scales the whole batch by one factor s = sqrt(batch·slots·p_t / Σ‖x‖²) so
/// the batch-average transmit power per slot is exactly p_t.
struct PowerNorm {
    double scale;
    double sum_sq; // pre-scaling Σ‖x‖² over the batch
};

PowerNorm power_normalize(std::vector<double>& x, std::size_t batch, double p_t,
                          std::size_t slots);

/// Gradient through the batch-coupled scale. x_pre is the batch before
/// scaling; grad (dL/dy) is rewritten in place to dL/dx:
///   dL/dx = s·g − (s/Σ)·(g·x_pre)·x_pre
/// The second term is the coupling every sample feels through the shared
/// scale; dropping it leaves a biased gradient that still trains but fails
/// finite-difference checks.
void power_normalize_backward(const std::vector<double>& x_pre,
                              const PowerNorm& pn, std::vector<double>& grad);

struct AdamState {
    double lr;
    double beta1 = 0.9, beta2 = 0.999, eps = 1e-8;
    std::uint64_t step = 0;
    std::vector<std::vector<double>> mw, vw, mb, vb;
};

AdamState make_adam(const MlpModel& model, double lr);
void adam_step(MlpModel& model, const Gradients& g, AdamState& state);

/// Flat parameter view for finite-difference checking: weights then biases,
/// layer by layer.
std::size_t param_count(const MlpModel& model);
double get_param(const MlpModel& model, std::size_t i);
void set_param(MlpModel& model, std::size_t i, double v);

/// Binary model file: magic `MIMOAE01`, little-endian u32 layer count,
/// per-layer header (u32 in, u32 out, u8 activation), then per layer all
/// weights row-major and biases as f64. Bit-exact round trip.
void save_model(const MlpModel& model, const std::string& path);
MlpModel load_model(const std::string& path);

/// Several models in one file: u32 count, then the blobs back to back. Used
/// for transmitter/receiver bundles.
void save_model_container(const std::vector<MlpModel>& models,
                          const std::string& path);
std::vector<MlpModel> load_model_container(const std::string& path);

/// Evaluation parallelism for the BLAS backend. Training defaults to one
/// thread; more threads trade bit-reproducibility for speed.
void set_blas_threads(int n);

} // namespace mimoae
