#include "mimoae/baseline.hpp"

#include "mimoae/errors.hpp"

#include <algorithm>
#include <cmath>

namespace mimoae {

ComplexMatrix alamouti_encode(std::size_t s1, std::size_t s2,
                              const Constellation& c, double p_t) {
    if (s1 >= c.size() || s2 >= c.size())
        throw InvalidInputError("alamouti_encode: label out of range");
    if (!(p_t > 0.0)) throw InvalidInputError("alamouti_encode: p_t must be positive");
    cplx p1 = c.points()[s1], p2 = c.points()[s2];
    double a = std::sqrt(p_t / 2.0);
    ComplexMatrix x(2, 2);
    x(0, 0) = a * p1;
    x(0, 1) = -a * std::conj(p2);
    x(1, 0) = a * p2;
    x(1, 1) = a * std::conj(p1);
    return x;
}

std::pair<std::size_t, std::size_t> alamouti_ml_detect(const ComplexMatrix& y,
                                                       const ComplexMatrix& h,
                                                       const Constellation& c,
                                                       double p_t, double n0) {
    if (y.rows() != 1 || y.cols() != 2 || h.rows() != 1 || h.cols() != 2)
        throw InvalidInputError("alamouti_ml_detect: y and h must be 1x2");
    cplx h1 = h(0, 0), h2 = h(0, 1);
    double hh = std::norm(h1) + std::norm(h2);
    if (hh <= 0.0)
        throw DegenerateChannelError("alamouti_ml_detect: zero channel");
    cplx y1 = y(0, 0), y2 = y(0, 1);
    cplx s1 = std::conj(h1) * y1 + h2 * std::conj(y2);
    cplx s2 = std::conj(h2) * y1 - h1 * std::conj(y2);
    double gain = std::sqrt(p_t / 2.0) * hh;
    return {detect(c, s1, gain, n0), detect(c, s2, gain, n0)};
}

std::size_t Allocation::total_size() const {
    std::size_t n = 1;
    for (const auto& s : streams) n *= s.constellation.size();
    return n;
}

std::vector<Constellation> default_catalog() {
    std::vector<Constellation> cat;
    cat.push_back(Constellation::build(ConstellationKind::trivial1));
    cat.push_back(Constellation::build(ConstellationKind::bpsk));
    cat.push_back(Constellation::build(ConstellationKind::qpsk));
    cat.push_back(Constellation::build(ConstellationKind::qam8));
    cat.push_back(Constellation::build(ConstellationKind::qam16));
    return cat;
}

namespace {

/// Ordered factorizations of m into catalog sizes, lexicographic in size.
void enumerate_factorizations(const std::vector<std::size_t>& sorted_idx,
                              const std::vector<Constellation>& catalog,
                              std::size_t n_streams, std::size_t m,
                              std::vector<std::size_t>& current,
                              std::vector<std::vector<std::size_t>>& out) {
    if (current.size() == n_streams) {
        if (m == 1) out.push_back(current);
        return;
    }
    for (std::size_t idx : sorted_idx) {
        std::size_t sz = catalog[idx].size();
        if (m % sz != 0) continue;
        current.push_back(idx);
        enumerate_factorizations(sorted_idx, catalog, n_streams, m / sz, current,
                                 out);
        current.pop_back();
    }
}

} // namespace

Allocation solve_allocation(const std::vector<double>& sigma, std::size_t m,
                            double p_t, double n0,
                            const std::vector<Constellation>& catalog) {
    if (sigma.empty()) throw InvalidInputError("solve_allocation: no streams");
    if (sigma.size() > 2)
        throw InvalidInputError("solve_allocation: more than two streams unsupported");
    for (std::size_t i = 0; i + 1 < sigma.size(); ++i)
        if (sigma[i] < sigma[i + 1])
            throw InvalidInputError("solve_allocation: sigma not descending");
    if (!(n0 > 0.0)) throw InvalidInputError("solve_allocation: n0 must be positive");
    if (p_t < 0.0) throw InvalidInputError("solve_allocation: negative p_t");
    if (m < 1 || catalog.empty())
        throw InvalidInputError("solve_allocation: bad m or empty catalog");

    std::vector<std::size_t> sorted_idx(catalog.size());
    for (std::size_t i = 0; i < catalog.size(); ++i) sorted_idx[i] = i;
    std::stable_sort(sorted_idx.begin(), sorted_idx.end(),
                     [&](std::size_t a, std::size_t b) {
                         return catalog[a].size() < catalog[b].size();
                     });

    std::vector<std::vector<std::size_t>> factorizations;
    std::vector<std::size_t> current;
    enumerate_factorizations(sorted_idx, catalog, sigma.size(), m, current,
                             factorizations);
    if (factorizations.empty())
        throw InfeasibleAllocationError(
            "solve_allocation: m has no factorization within the catalog");

    const std::size_t grid = sigma.size() == 1 ? 1 : 101;
    bool have_best = false;
    double best_obj = 0.0;
    std::vector<std::size_t> best_fact;
    std::vector<double> best_powers;

    std::vector<double> powers(sigma.size());
    for (const auto& fact : factorizations) {
        for (std::size_t k = 0; k < grid; ++k) {
            if (sigma.size() == 1) {
                powers[0] = p_t;
            } else {
                powers[0] = double(k) * p_t / 100.0;
                powers[1] = p_t - powers[0];
            }
            double obj = 1.0;
            for (std::size_t i = 0; i < sigma.size(); ++i) {
                const Constellation& c = catalog[fact[i]];
                if (c.size() == 1) powers[i] = 0.0;
                double gamma = sigma[i] * sigma[i] * powers[i] / n0;
                obj *= 1.0 - ser_analytic(c, gamma);
            }
            if (!have_best || obj > best_obj) {
                have_best = true;
                best_obj = obj;
                best_fact = fact;
                best_powers = powers;
            }
        }
    }

    Allocation alloc;
    alloc.objective = best_obj;
    for (std::size_t i = 0; i < sigma.size(); ++i)
        alloc.streams.push_back({catalog[best_fact[i]], best_powers[i]});
    return alloc;
}

Allocation equal_power_qpsk(std::size_t n_streams, double p_t) {
    if (n_streams < 1) throw InvalidInputError("equal_power_qpsk: no streams");
    Allocation alloc;
    Constellation qpsk = Constellation::build(ConstellationKind::qpsk);
    for (std::size_t i = 0; i < n_streams; ++i)
        alloc.streams.push_back({qpsk, p_t / double(n_streams)});
    return alloc;
}

std::vector<std::size_t> split_message(std::size_t m, const Allocation& alloc) {
    if (m >= alloc.total_size())
        throw InvalidInputError("split_message: message out of range");
    std::vector<std::size_t> labels(alloc.streams.size());
    for (std::size_t i = alloc.streams.size(); i-- > 0;) {
        std::size_t sz = alloc.streams[i].constellation.size();
        labels[i] = m % sz;
        m /= sz;
    }
    return labels;
}

std::size_t join_message(const std::vector<std::size_t>& labels,
                         const Allocation& alloc) {
    if (labels.size() != alloc.streams.size())
        throw InvalidInputError("join_message: label count mismatch");
    std::size_t m = 0;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        std::size_t sz = alloc.streams[i].constellation.size();
        if (labels[i] >= sz) throw InvalidInputError("join_message: label out of range");
        m = m * sz + labels[i];
    }
    return m;
}

std::vector<std::size_t> svd_roundtrip(const ComplexMatrix& h,
                                       const std::vector<std::size_t>& labels,
                                       const Allocation& alloc, double n0,
                                       RngStream& stream) {
    const std::size_t ns = alloc.streams.size();
    if (labels.size() != ns)
        throw InvalidInputError("svd_roundtrip: one label per stream required");
    SvdResult dec = svd(h);
    if (dec.sigma.size() < ns)
        throw InvalidInputError("svd_roundtrip: channel rank below stream count");

    ComplexMatrix s(ns, 1);
    for (std::size_t i = 0; i < ns; ++i) {
        const auto& st = alloc.streams[i];
        if (labels[i] >= st.constellation.size())
            throw InvalidInputError("svd_roundtrip: label out of range");
        s(i, 0) = std::sqrt(st.power) * st.constellation.points()[labels[i]];
    }

    ComplexMatrix v_active(h.cols(), ns);
    ComplexMatrix u_active(h.rows(), ns);
    for (std::size_t c = 0; c < ns; ++c) {
        for (std::size_t r = 0; r < h.cols(); ++r) v_active(r, c) = dec.v(r, c);
        for (std::size_t r = 0; r < h.rows(); ++r) u_active(r, c) = dec.u(r, c);
    }

    ComplexMatrix x = v_active * s;
    ChannelRealization ch{h, 1};
    ComplexMatrix y = apply(ch, x, NoiseConfig{n0, 0.0}, stream);
    ComplexMatrix yhat = u_active.adjoint() * y;

    std::vector<std::size_t> detected(ns);
    for (std::size_t i = 0; i < ns; ++i) {
        const auto& st = alloc.streams[i];
        double gain = dec.sigma[i] * std::sqrt(st.power);
        detected[i] = detect(st.constellation, yhat(i, 0), gain, n0);
    }
    return detected;
}

std::vector<std::size_t> zf_roundtrip(const ComplexMatrix& h,
                                      const std::vector<std::size_t>& labels,
                                      const Constellation& c, double p_t,
                                      double n0, RngStream& stream) {
    const std::size_t users = h.rows();
    if (labels.size() != users)
        throw InvalidInputError("zf_roundtrip: one label per user required");
    if (!(p_t > 0.0)) throw InvalidInputError("zf_roundtrip: p_t must be positive");
    ComplexMatrix hdag = pseudo_inverse(h);
    double alpha = std::sqrt(p_t) / hdag.frobenius_norm();

    ComplexMatrix s(users, 1);
    for (std::size_t i = 0; i < users; ++i) {
        if (labels[i] >= c.size())
            throw InvalidInputError("zf_roundtrip: label out of range");
        s(i, 0) = c.points()[labels[i]];
    }
    ComplexMatrix x = (hdag * s) * alpha;
    ChannelRealization ch{h, 1};
    ComplexMatrix y = apply(ch, x, NoiseConfig{n0, 0.0}, stream);

    std::vector<std::size_t> detected(users);
    for (std::size_t i = 0; i < users; ++i)
        detected[i] = detect(c, y(i, 0), alpha, n0);
    return detected;
}

} // namespace mimoae
