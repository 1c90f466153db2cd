#pragma once

#include "mimoae/linalg.hpp"
#include "mimoae/rng.hpp"

#include <string>
#include <vector>

namespace mimoae {

enum class ConstellationKind { trivial1, bpsk, qpsk, qam8, qam16, custom };

/// A set of complex points indexed by label 0..M-1, normalized to unit
/// average energy. Catalog kinds carry closed-form error expressions; custom
/// (learned) shapes are evaluated by simulation only.
class Constellation {
public:
    static Constellation build(ConstellationKind kind);
    static Constellation build(const std::string& kind_name);

    /// Arbitrary point set, renormalized to unit average energy. Labels
    /// follow input order.
    static Constellation custom(std::vector<cplx> points, std::string name);

    std::size_t size() const { return points_.size(); }
    const std::vector<cplx>& points() const { return points_; }
    const std::string& name() const { return name_; }
    ConstellationKind kind() const { return kind_; }

private:
    Constellation(ConstellationKind kind, std::vector<cplx> points,
                  std::string name);

    ConstellationKind kind_;
    std::vector<cplx> points_;
    std::string name_;
};

/// Max-likelihood label for y under known complex gain: argmin |y - gain·p|².
/// n0 is accepted for interface symmetry; with equal priors it never changes
/// the argmin. Ties break to the lowest label.
std::size_t detect(const Constellation& c, cplx y, cplx gain, double n0 = 1.0);

/// Gaussian tail probability Q(x) = P(N(0,1) > x).
double q_function(double x);

/// Closed-form symbol error probability at per-symbol SNR gamma. Catalog
/// constellations only; custom shapes raise UnsupportedConstellationError.
double ser_analytic(const Constellation& c, double gamma);

struct MonteCarloSer {
    double ser;
    std::uint64_t errors;
    std::uint64_t symbols;
};

/// AWGN simulation at per-symbol SNR gamma: y = sqrt(gamma)·p + n with unit
/// noise variance, detection gain sqrt(gamma). Runs until min_errors errors
/// or max_symbols symbols.
MonteCarloSer ser_montecarlo(const Constellation& c, double gamma,
                             RngStream& stream, std::uint64_t min_errors,
                             std::uint64_t max_symbols);

/// One point per line, `re<TAB>im`, 17 significant digits.
void save_constellation(const Constellation& c, const std::string& path);

/// Loads and renormalizes to unit average energy. Malformed or empty files
/// raise FormatError naming the offending line.
Constellation load_constellation(const std::string& path);

} // namespace mimoae
