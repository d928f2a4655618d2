#include "polarkit/linalg.hpp"

#include "polarkit/error.hpp"

#include <cmath>
#include <numeric>

namespace polarkit {

QrDecomposition::QrDecomposition(Matrix A) : n_(A.rows), k_(A.cols), qr_(std::move(A)) {
    if (n_ < k_)
        throw Error(errc::rank_deficient,
                    "design has more columns (" + std::to_string(k_) + ") than rows (" +
                        std::to_string(n_) + ")");
    tau_.assign(k_, 0.0);
    perm_.resize(k_);
    std::iota(perm_.begin(), perm_.end(), std::size_t{0});

    for (std::size_t j = 0; j < k_; ++j) {
        // Pivot: remaining column with the largest trailing norm. Norms are
        // recomputed exactly; designs here are small enough that downdating
        // is not worth the drift.
        std::size_t pivot = j;
        double best = -1.0;
        for (std::size_t l = j; l < k_; ++l) {
            double s = 0.0;
            for (std::size_t i = j; i < n_; ++i) s += qr_(i, l) * qr_(i, l);
            if (s > best) {
                best = s;
                pivot = l;
            }
        }
        if (pivot != j) {
            for (std::size_t i = 0; i < n_; ++i) std::swap(qr_(i, j), qr_(i, pivot));
            std::swap(perm_[j], perm_[pivot]);
        }

        const double sigma = std::sqrt(best < 0.0 ? 0.0 : best);
        if (sigma == 0.0) {
            tau_[j] = 0.0; // trailing block is exactly zero
            continue;
        }
        const double x0 = qr_(j, j);
        const double alpha = x0 >= 0.0 ? -sigma : sigma;
        const double v0 = x0 - alpha;
        // H = I - tau u u^T with u = v / v0 (u0 = 1 implicit).
        tau_[j] = (sigma + std::abs(x0)) / sigma;
        for (std::size_t i = j + 1; i < n_; ++i) qr_(i, j) /= v0;
        qr_(j, j) = alpha;

        for (std::size_t l = j + 1; l < k_; ++l) {
            double dot = qr_(j, l);
            for (std::size_t i = j + 1; i < n_; ++i) dot += qr_(i, j) * qr_(i, l);
            dot *= tau_[j];
            qr_(j, l) -= dot;
            for (std::size_t i = j + 1; i < n_; ++i) qr_(i, l) -= dot * qr_(i, j);
        }
    }
}

std::size_t QrDecomposition::rank(double rel_tol) const {
    double max_diag = 0.0;
    for (std::size_t j = 0; j < k_; ++j) max_diag = std::max(max_diag, std::abs(qr_(j, j)));
    if (max_diag == 0.0) return 0;
    std::size_t r = 0;
    for (std::size_t j = 0; j < k_; ++j)
        if (std::abs(qr_(j, j)) >= rel_tol * max_diag) ++r;
    return r;
}

std::vector<double> QrDecomposition::solve(std::span<const double> y) const {
    if (y.size() != n_)
        throw Error(errc::length_mismatch, "response length does not match design rows");

    std::vector<double> w(y.begin(), y.end());
    // Apply Q^T.
    for (std::size_t j = 0; j < k_; ++j) {
        if (tau_[j] == 0.0) continue;
        double dot = w[j];
        for (std::size_t i = j + 1; i < n_; ++i) dot += qr_(i, j) * w[i];
        dot *= tau_[j];
        w[j] -= dot;
        for (std::size_t i = j + 1; i < n_; ++i) w[i] -= dot * qr_(i, j);
    }
    // Back-substitute R z = (Q^T y)[0:k].
    std::vector<double> z(k_, 0.0);
    for (std::size_t jj = k_; jj-- > 0;) {
        double s = w[jj];
        for (std::size_t l = jj + 1; l < k_; ++l) s -= qr_(jj, l) * z[l];
        const double d = qr_(jj, jj);
        if (d == 0.0)
            throw Error(errc::rank_deficient, "zero diagonal in R during solve");
        z[jj] = s / d;
    }
    std::vector<double> beta(k_, 0.0);
    for (std::size_t j = 0; j < k_; ++j) beta[perm_[j]] = z[j];
    return beta;
}

Matrix QrDecomposition::xtx_inverse() const {
    // U = R^{-1} by back substitution on the identity.
    Matrix u(k_, k_);
    for (std::size_t col = 0; col < k_; ++col) {
        std::vector<double> e(k_, 0.0);
        e[col] = 1.0;
        for (std::size_t jj = k_; jj-- > 0;) {
            double s = e[jj];
            for (std::size_t l = jj + 1; l < k_; ++l) s -= qr_(jj, l) * u(l, col);
            const double d = qr_(jj, jj);
            if (d == 0.0)
                throw Error(errc::rank_deficient, "zero diagonal in R during inversion");
            u(jj, col) = s / d;
        }
    }
    // C = U U^T, then undo the column permutation.
    Matrix c(k_, k_);
    for (std::size_t i = 0; i < k_; ++i)
        for (std::size_t j = 0; j < k_; ++j) {
            double s = 0.0;
            for (std::size_t l = std::max(i, j); l < k_; ++l) s += u(i, l) * u(j, l);
            c(i, j) = s;
        }
    Matrix out(k_, k_);
    for (std::size_t i = 0; i < k_; ++i)
        for (std::size_t j = 0; j < k_; ++j) out(perm_[i], perm_[j]) = c(i, j);
    return out;
}

std::vector<double> mat_vec(const Matrix& m, std::span<const double> x) {
    std::vector<double> y(m.rows, 0.0);
    for (std::size_t i = 0; i < m.rows; ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < m.cols; ++j) s += m(i, j) * x[j];
        y[i] = s;
    }
    return y;
}

} // namespace polarkit
