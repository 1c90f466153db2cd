#include "mimoae/linalg.hpp"

#include "mimoae/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace mimoae {

ComplexMatrix::ComplexMatrix(std::size_t rows, std::size_t cols,
                             std::vector<cplx> entries)
    : rows_(rows), cols_(cols), data_(std::move(entries)) {
    if (data_.size() != rows * cols)
        throw InvalidInputError("ComplexMatrix: entry count does not match shape");
}

ComplexMatrix ComplexMatrix::identity(std::size_t n) {
    ComplexMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

ComplexMatrix ComplexMatrix::adjoint() const {
    ComplexMatrix out(cols_, rows_);
    for (std::size_t r = 0; r < rows_; ++r)
        for (std::size_t c = 0; c < cols_; ++c)
            out(c, r) = std::conj((*this)(r, c));
    return out;
}

ComplexMatrix ComplexMatrix::operator*(const ComplexMatrix& rhs) const {
    if (cols_ != rhs.rows_)
        throw InvalidInputError("ComplexMatrix: product shape mismatch");
    ComplexMatrix out(rows_, rhs.cols_);
    for (std::size_t r = 0; r < rows_; ++r)
        for (std::size_t k = 0; k < cols_; ++k) {
            cplx a = (*this)(r, k);
            for (std::size_t c = 0; c < rhs.cols_; ++c)
                out(r, c) += a * rhs(k, c);
        }
    return out;
}

ComplexMatrix ComplexMatrix::operator*(cplx s) const {
    ComplexMatrix out = *this;
    for (auto& e : out.data_) e *= s;
    return out;
}

ComplexMatrix ComplexMatrix::operator+(const ComplexMatrix& rhs) const {
    if (rows_ != rhs.rows_ || cols_ != rhs.cols_)
        throw InvalidInputError("ComplexMatrix: sum shape mismatch");
    ComplexMatrix out = *this;
    for (std::size_t i = 0; i < data_.size(); ++i) out.data_[i] += rhs.data_[i];
    return out;
}

ComplexMatrix ComplexMatrix::operator-(const ComplexMatrix& rhs) const {
    if (rows_ != rhs.rows_ || cols_ != rhs.cols_)
        throw InvalidInputError("ComplexMatrix: difference shape mismatch");
    ComplexMatrix out = *this;
    for (std::size_t i = 0; i < data_.size(); ++i) out.data_[i] -= rhs.data_[i];
    return out;
}

double ComplexMatrix::frobenius_norm() const {
    double s = 0.0;
    for (const auto& e : data_) s += std::norm(e);
    return std::sqrt(s);
}

bool ComplexMatrix::is_finite() const {
    for (const auto& e : data_)
        if (!std::isfinite(e.real()) || !std::isfinite(e.imag())) return false;
    return true;
}

ComplexMatrix ComplexMatrix::col(std::size_t c) const {
    ComplexMatrix out(rows_, 1);
    for (std::size_t r = 0; r < rows_; ++r) out(r, 0) = (*this)(r, c);
    return out;
}

namespace {

constexpr double kRankCutoff = 1e-12;

/// One-sided Jacobi for tall-or-square input (rows ≥ cols). Columns of b are
/// rotated until pairwise orthogonal; v accumulates the rotations.
void jacobi_orthogonalize(ComplexMatrix& b, ComplexMatrix& v) {
    const std::size_t n = b.cols();
    const std::size_t m = b.rows();
    const int max_sweeps = 60;
    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
        bool rotated = false;
        for (std::size_t p = 0; p + 1 < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                double app = 0.0, aqq = 0.0;
                cplx apq = 0.0;
                for (std::size_t r = 0; r < m; ++r) {
                    app += std::norm(b(r, p));
                    aqq += std::norm(b(r, q));
                    apq += std::conj(b(r, p)) * b(r, q);
                }
                double mag = std::abs(apq);
                if (mag <= 1e-15 * std::sqrt(app * aqq) || mag == 0.0) continue;
                rotated = true;
                cplx phase = apq / mag;
                double tau = (aqq - app) / (2.0 * mag);
                double t = (tau >= 0.0 ? 1.0 : -1.0) /
                           (std::abs(tau) + std::sqrt(1.0 + tau * tau));
                double c = 1.0 / std::sqrt(1.0 + t * t);
                double s = c * t;
                cplx sp = s * phase;
                for (std::size_t r = 0; r < m; ++r) {
                    cplx bp = b(r, p), bq = b(r, q);
                    b(r, p) = c * bp - std::conj(sp) * bq;
                    b(r, q) = sp * bp + c * bq;
                }
                for (std::size_t r = 0; r < n; ++r) {
                    cplx vp = v(r, p), vq = v(r, q);
                    v(r, p) = c * vp - std::conj(sp) * vq;
                    v(r, q) = sp * vp + c * vq;
                }
            }
        }
        if (!rotated) return;
    }
}

SvdResult svd_tall(const ComplexMatrix& h) {
    ComplexMatrix b = h;
    ComplexMatrix v = ComplexMatrix::identity(h.cols());
    jacobi_orthogonalize(b, v);

    const std::size_t n = h.cols();
    std::vector<double> norms(n);
    for (std::size_t c = 0; c < n; ++c) {
        double s = 0.0;
        for (std::size_t r = 0; r < h.rows(); ++r) s += std::norm(b(r, c));
        norms[c] = std::sqrt(s);
    }
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t c) { return norms[a] > norms[c]; });

    double sigma_max = norms[order[0]];
    std::size_t rank = 0;
    while (rank < n && norms[order[rank]] > kRankCutoff * sigma_max) ++rank;

    SvdResult out;
    out.sigma.resize(rank);
    out.u = ComplexMatrix(h.rows(), rank);
    out.v = ComplexMatrix(h.cols(), rank);
    for (std::size_t j = 0; j < rank; ++j) {
        std::size_t c = order[j];
        out.sigma[j] = norms[c];
        for (std::size_t r = 0; r < h.rows(); ++r)
            out.u(r, j) = b(r, c) / norms[c];
        for (std::size_t r = 0; r < h.cols(); ++r) out.v(r, j) = v(r, c);
    }
    return out;
}

} // namespace

SvdResult svd(const ComplexMatrix& h) {
    if (h.rows() == 0 || h.cols() == 0)
        throw InvalidInputError("svd: empty matrix");
    if (!h.is_finite()) throw InvalidInputError("svd: non-finite entries");
    if (h.frobenius_norm() == 0.0)
        throw SingularChannelError("svd: zero matrix has no positive singular values");
    if (h.rows() >= h.cols()) return svd_tall(h);
    // Wide input: factor the adjoint and swap the roles of u and v.
    SvdResult t = svd_tall(h.adjoint());
    return {std::move(t.v), std::move(t.sigma), std::move(t.u)};
}

ComplexMatrix pseudo_inverse(const ComplexMatrix& h) {
    if (!h.is_finite()) throw InvalidInputError("pseudo_inverse: non-finite entries");
    if (h.cols() < h.rows())
        throw InvalidInputError("pseudo_inverse: needs cols >= rows (full row rank)");
    SvdResult s = svd(h);
    if (s.sigma.size() < h.rows())
        throw SingularChannelError("pseudo_inverse: channel is rank deficient");
    // h = u·diag(sigma)·vᴴ, full row rank, so h† = v·diag(1/sigma)·uᴴ.
    ComplexMatrix vs = s.v;
    for (std::size_t c = 0; c < s.sigma.size(); ++c)
        for (std::size_t r = 0; r < vs.rows(); ++r) vs(r, c) /= s.sigma[c];
    return vs * s.u.adjoint();
}

std::vector<double> to_real_composite(const ComplexMatrix& x) {
    std::vector<double> out(2 * x.rows() * x.cols());
    to_real_composite(x, out.data());
    return out;
}

void to_real_composite(const ComplexMatrix& x, double* dst) {
    const std::size_t n = x.rows() * x.cols();
    std::size_t i = 0;
    for (std::size_t c = 0; c < x.cols(); ++c)
        for (std::size_t r = 0; r < x.rows(); ++r, ++i) {
            dst[i] = x(r, c).real();
            dst[n + i] = x(r, c).imag();
        }
}

ComplexMatrix from_real_composite(const std::vector<double>& v, std::size_t rows,
                                  std::size_t cols) {
    const std::size_t n = rows * cols;
    if (v.size() != 2 * n)
        throw InvalidInputError("from_real_composite: length does not match shape");
    ComplexMatrix out(rows, cols);
    std::size_t i = 0;
    for (std::size_t c = 0; c < cols; ++c)
        for (std::size_t r = 0; r < rows; ++r, ++i)
            out(r, c) = cplx(v[i], v[n + i]);
    return out;
}

} // namespace mimoae
