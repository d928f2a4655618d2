#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace polarkit {

/// Minimal dense row-major matrix.
struct Matrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> a;

    Matrix() = default;
    Matrix(std::size_t r, std::size_t c) : rows(r), cols(c), a(r * c, 0.0) {}

    double& operator()(std::size_t i, std::size_t j) { return a[i * cols + j]; }
    double operator()(std::size_t i, std::size_t j) const { return a[i * cols + j]; }
};

/// Householder QR with column pivoting (Businger-Golub). Columns are pivoted
/// by largest remaining norm, so the R diagonal is non-increasing in
/// magnitude and near-dependent columns surface at the tail.
class QrDecomposition {
public:
    /// Requires rows >= cols.
    explicit QrDecomposition(Matrix A);

    std::size_t row_count() const { return n_; }
    std::size_t col_count() const { return k_; }

    /// Numerical rank: count of |R_jj| >= rel_tol * max|R_ii|.
    std::size_t rank(double rel_tol = 1e-10) const;

    /// perm[j] = original index of the column pivoted to position j.
    const std::vector<std::size_t>& permutation() const { return perm_; }

    double r_diag(std::size_t j) const { return qr_(j, j); }

    /// Least-squares solution of min ||y - X b||, coefficients in original
    /// column order. The caller must have verified full rank.
    std::vector<double> solve(std::span<const double> y) const;

    /// (X^T X)^{-1} in original column order, via R^{-1} R^{-T}.
    Matrix xtx_inverse() const;

private:
    std::size_t n_ = 0;
    std::size_t k_ = 0;
    Matrix qr_;               // R in the upper triangle, Householder u below
    std::vector<double> tau_; // reflection scales; 0 means identity
    std::vector<std::size_t> perm_;
};

/// y = M x.
std::vector<double> mat_vec(const Matrix& m, std::span<const double> x);

} // namespace polarkit
