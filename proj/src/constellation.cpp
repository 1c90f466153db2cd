#include "mimoae/constellation.hpp"

#include "mimoae/errors.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace mimoae {
namespace {

std::uint32_t gray(std::uint32_t k) { return k ^ (k >> 1); }

/// Grid constellation: lx × ly points at odd-integer coordinates, Gray label
/// per dimension, x bits above y bits. Position 0 is the most positive
/// amplitude, so label 0 lands in the first quadrant.
std::vector<cplx> grid_points(std::uint32_t lx, std::uint32_t ly, double scale) {
    std::uint32_t bits_y = 0;
    while ((1u << bits_y) < ly) ++bits_y;
    std::vector<cplx> pts(std::size_t(lx) * ly);
    for (std::uint32_t ix = 0; ix < lx; ++ix)
        for (std::uint32_t iy = 0; iy < ly; ++iy) {
            double ax = double(lx - 1 - 2 * double(ix)) * scale;
            double ay = double(ly - 1 - 2 * double(iy)) * scale;
            std::uint32_t label = (gray(ix) << bits_y) | gray(iy);
            pts[label] = {ax, ay};
        }
    return pts;
}

void check_points(const std::vector<cplx>& pts, const std::string& name) {
    if (pts.empty()) throw InvalidInputError(name + ": constellation is empty");
    for (const auto& p : pts)
        if (!std::isfinite(p.real()) || !std::isfinite(p.imag()))
            throw InvalidInputError(name + ": non-finite point");
    for (std::size_t i = 0; i < pts.size(); ++i)
        for (std::size_t j = i + 1; j < pts.size(); ++j)
            if (pts[i] == pts[j])
                throw InvalidInputError(name + ": duplicate points");
}

double mean_energy(const std::vector<cplx>& pts) {
    double e = 0.0;
    for (const auto& p : pts) e += std::norm(p);
    return e / double(pts.size());
}

} // namespace

Constellation::Constellation(ConstellationKind kind, std::vector<cplx> points,
                             std::string name)
    : kind_(kind), points_(std::move(points)), name_(std::move(name)) {
    check_points(points_, name_);
}

Constellation Constellation::build(ConstellationKind kind) {
    switch (kind) {
        case ConstellationKind::trivial1:
            return {kind, {cplx(0.0, 0.0)}, "trivial1"};
        case ConstellationKind::bpsk:
            return {kind, {cplx(1.0, 0.0), cplx(-1.0, 0.0)}, "bpsk"};
        case ConstellationKind::qpsk:
            return {kind, grid_points(2, 2, 1.0 / std::sqrt(2.0)), "qpsk"};
        case ConstellationKind::qam8:
            return {kind, grid_points(4, 2, 1.0 / std::sqrt(6.0)), "qam8"};
        case ConstellationKind::qam16:
            return {kind, grid_points(4, 4, 1.0 / std::sqrt(10.0)), "qam16"};
        case ConstellationKind::custom:
            throw InvalidInputError("build: custom constellations need explicit points");
    }
    throw InvalidInputError("build: unknown constellation kind");
}

Constellation Constellation::build(const std::string& kind_name) {
    if (kind_name == "trivial1") return build(ConstellationKind::trivial1);
    if (kind_name == "bpsk") return build(ConstellationKind::bpsk);
    if (kind_name == "qpsk") return build(ConstellationKind::qpsk);
    if (kind_name == "qam8") return build(ConstellationKind::qam8);
    if (kind_name == "qam16") return build(ConstellationKind::qam16);
    throw InvalidInputError("build: unknown constellation '" + kind_name + "'");
}

Constellation Constellation::custom(std::vector<cplx> points, std::string name) {
    double e = mean_energy(points);
    if (e > 0.0) {
        double s = 1.0 / std::sqrt(e);
        for (auto& p : points) p *= s;
    }
    return {ConstellationKind::custom, std::move(points), std::move(name)};
}

std::size_t detect(const Constellation& c, cplx y, cplx gain, double /*n0*/) {
    const auto& pts = c.points();
    std::size_t best = 0;
    double best_d = std::norm(y - gain * pts[0]);
    for (std::size_t i = 1; i < pts.size(); ++i) {
        double d = std::norm(y - gain * pts[i]);
        if (d < best_d) {
            best_d = d;
            best = i;
        }
    }
    return best;
}

double q_function(double x) { return 0.5 * std::erfc(x / std::sqrt(2.0)); }

namespace {

/// Error probability of Gray L-PAM at odd-integer grid scaled by `scale`,
/// per-dimension noise std 1/sqrt(2·gamma) relative to the unit-energy
/// constellation.
double pam_error(std::uint32_t l, double scale, double gamma) {
    if (l <= 1) return 0.0;
    return 2.0 * (1.0 - 1.0 / double(l)) * q_function(scale * std::sqrt(2.0 * gamma));
}

} // namespace

double ser_analytic(const Constellation& c, double gamma) {
    if (gamma < 0.0) throw InvalidInputError("ser_analytic: negative SNR");
    switch (c.kind()) {
        case ConstellationKind::trivial1:
            return 0.0;
        case ConstellationKind::bpsk:
            return q_function(std::sqrt(2.0 * gamma));
        case ConstellationKind::qpsk: {
            double p = pam_error(2, 1.0 / std::sqrt(2.0), gamma);
            return 1.0 - (1.0 - p) * (1.0 - p);
        }
        case ConstellationKind::qam8: {
            double px = pam_error(4, 1.0 / std::sqrt(6.0), gamma);
            double py = pam_error(2, 1.0 / std::sqrt(6.0), gamma);
            return 1.0 - (1.0 - px) * (1.0 - py);
        }
        case ConstellationKind::qam16: {
            double p = pam_error(4, 1.0 / std::sqrt(10.0), gamma);
            return 1.0 - (1.0 - p) * (1.0 - p);
        }
        case ConstellationKind::custom:
            break;
    }
    throw UnsupportedConstellationError(
        "ser_analytic: no closed form for '" + c.name() + "'");
}

MonteCarloSer ser_montecarlo(const Constellation& c, double gamma,
                             RngStream& stream, std::uint64_t min_errors,
                             std::uint64_t max_symbols) {
    if (gamma < 0.0) throw InvalidInputError("ser_montecarlo: negative SNR");
    const double g = std::sqrt(gamma);
    const std::size_t m = c.size();
    std::uint64_t errors = 0, symbols = 0;
    while (symbols < max_symbols && errors < min_errors) {
        std::size_t label = (m == 1) ? 0 : std::size_t(stream.uniform_int(m));
        cplx y = g * c.points()[label] + stream.complex_gaussian();
        if (detect(c, y, g) != label) ++errors;
        ++symbols;
    }
    return {symbols ? double(errors) / double(symbols) : 0.0, errors, symbols};
}

void save_constellation(const Constellation& c, const std::string& path) {
    std::ofstream f(path);
    if (!f) throw FormatError("cannot open '" + path + "' for writing");
    char line[80];
    for (const auto& p : c.points()) {
        std::snprintf(line, sizeof line, "%.17g\t%.17g\n", p.real(), p.imag());
        f << line;
    }
    if (!f) throw FormatError("write to '" + path + "' failed");
}

Constellation load_constellation(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw FormatError("cannot open '" + path + "'");
    std::vector<cplx> pts;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(f, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::istringstream ss(line);
        double re, im;
        if (!(ss >> re >> im))
            throw FormatError(path + ":" + std::to_string(lineno) +
                              ": expected two numbers");
        std::string rest;
        if (ss >> rest)
            throw FormatError(path + ":" + std::to_string(lineno) +
                              ": trailing content");
        pts.emplace_back(re, im);
    }
    if (pts.empty()) throw FormatError(path + ": no constellation points");
    return Constellation::custom(std::move(pts), path);
}

} // namespace mimoae
