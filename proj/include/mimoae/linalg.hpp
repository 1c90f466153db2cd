#pragma once

#include <complex>
#include <cstddef>
#include <vector>

namespace mimoae {

using cplx = std::complex<double>;

/// Dense complex matrix, row-major. Sized for channel matrices and symbol
/// blocks (a few rows/cols), not for large-scale work.
class ComplexMatrix {
public:
    ComplexMatrix() : rows_(0), cols_(0) {}
    ComplexMatrix(std::size_t rows, std::size_t cols)
        : rows_(rows), cols_(cols), data_(rows * cols) {}
    ComplexMatrix(std::size_t rows, std::size_t cols, std::vector<cplx> entries);

    static ComplexMatrix identity(std::size_t n);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    cplx& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    const cplx& operator()(std::size_t r, std::size_t c) const {
        return data_[r * cols_ + c];
    }

    const std::vector<cplx>& data() const { return data_; }
    std::vector<cplx>& data() { return data_; }

    ComplexMatrix adjoint() const;
    ComplexMatrix operator*(const ComplexMatrix& rhs) const;
    ComplexMatrix operator*(cplx s) const;
    ComplexMatrix operator+(const ComplexMatrix& rhs) const;
    ComplexMatrix operator-(const ComplexMatrix& rhs) const;

    double frobenius_norm() const;
    bool is_finite() const;

    /// Matrix column as an n×1 matrix.
    ComplexMatrix col(std::size_t c) const;

private:
    std::size_t rows_, cols_;
    std::vector<cplx> data_;
};

struct SvdResult {
    ComplexMatrix u;           // rows(h) × rank
    std::vector<double> sigma; // descending, strictly positive
    ComplexMatrix v;           // cols(h) × rank
};

/// Thin SVD truncated to numerical rank: h = u · diag(sigma) · vᴴ.
/// Singular values at or below 1e-12 · sigma_max are dropped.
SvdResult svd(const ComplexMatrix& h);

/// Right pseudo-inverse hᴴ(h·hᴴ)⁻¹ for full-row-rank h (cols ≥ rows).
/// Throws SingularChannelError when h is numerically rank deficient.
ComplexMatrix pseudo_inverse(const ComplexMatrix& h);

/// Column-stack x, then lay out all real parts followed by all imaginary
/// parts. Length 2·rows·cols. The fixed ordering is part of the model file
/// contract: network inputs built from matrices must not depend on how a
/// particular build happens to store them.
std::vector<double> to_real_composite(const ComplexMatrix& x);

/// Same layout written into a caller-provided buffer of 2·rows·cols doubles.
void to_real_composite(const ComplexMatrix& x, double* dst);

/// Inverse of to_real_composite for a matrix of known shape.
ComplexMatrix from_real_composite(const std::vector<double>& v, std::size_t rows,
                                  std::size_t cols);

} // namespace mimoae
