#pragma once

// Small dense linear algebra kernels: least squares by Householder QR,
// one-sided Jacobi SVD and a symmetric banded Cholesky solver.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <span>
#include <vector>

#include "tsdecomp/error.hpp"

namespace tsdecomp::detail {

/// Row-major dense matrix.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    [[nodiscard]] std::size_t rows() const noexcept { return rows_; }
    [[nodiscard]] std::size_t cols() const noexcept { return cols_; }

    double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

    [[nodiscard]] std::span<double> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
    [[nodiscard]] std::span<const double> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }

    [[nodiscard]] std::vector<double> column(std::size_t c) const {
        std::vector<double> out(rows_);
        for (std::size_t r = 0; r < rows_; ++r) out[r] = (*this)(r, c);
        return out;
    }

    [[nodiscard]] Matrix transposed() const {
        Matrix t(cols_, rows_);
        for (std::size_t r = 0; r < rows_; ++r)
            for (std::size_t c = 0; c < cols_; ++c) t(c, r) = (*this)(r, c);
        return t;
    }

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

struct LeastSquaresFit {
    std::vector<double> beta;
    std::vector<double> fitted;
    std::vector<double> residuals;
    double rss = 0.0;
    /// Diagonal of (X'X)^{-1}; multiply by rss/df for coefficient variances.
    std::vector<double> xtx_inv_diag;
    std::size_t df = 0;

    [[nodiscard]] double sigma2() const { return df > 0 ? rss / static_cast<double>(df) : 0.0; }
    [[nodiscard]] double std_error(std::size_t j) const { return std::sqrt(sigma2() * xtx_inv_diag[j]); }
};

/// Ordinary least squares y ~ X via Householder QR.
/// Throws Degenerate when X is numerically rank deficient.
inline LeastSquaresFit least_squares(const Matrix& x, std::span<const double> y) {
    const std::size_t n = x.rows();
    const std::size_t p = x.cols();
    if (y.size() != n) throw_parameter("least_squares: dimension mismatch");
    if (n < p || p == 0) throw_degenerate("least_squares: fewer observations than regressors");

    // Column-major working copy.
    std::vector<double> a(n * p);
    for (std::size_t r = 0; r < n; ++r)
        for (std::size_t c = 0; c < p; ++c) a[c * n + r] = x(r, c);
    std::vector<double> qty(y.begin(), y.end());
    std::vector<double> rdiag(p);

    std::vector<double> col_norm0(p);
    for (std::size_t c = 0; c < p; ++c) {
        double s = 0.0;
        for (std::size_t r = 0; r < n; ++r) s += a[c * n + r] * a[c * n + r];
        col_norm0[c] = std::sqrt(s);
    }

    for (std::size_t k = 0; k < p; ++k) {
        double* colk = a.data() + k * n;
        double norm = 0.0;
        for (std::size_t r = k; r < n; ++r) norm += colk[r] * colk[r];
        norm = std::sqrt(norm);
        if (norm <= 1e-11 * std::max(col_norm0[k], 1e-300) || norm == 0.0)
            throw_degenerate("least_squares: design matrix is singular");
        const double alpha = colk[k] > 0 ? -norm : norm;
        // v = x - alpha e1, stored in place.
        colk[k] -= alpha;
        double vnorm2 = 0.0;
        for (std::size_t r = k; r < n; ++r) vnorm2 += colk[r] * colk[r];
        auto reflect = [&](double* target) {
            double dot = 0.0;
            for (std::size_t r = k; r < n; ++r) dot += colk[r] * target[r];
            const double f = 2.0 * dot / vnorm2;
            for (std::size_t r = k; r < n; ++r) target[r] -= f * colk[r];
        };
        for (std::size_t c = k + 1; c < p; ++c) reflect(a.data() + c * n);
        reflect(qty.data());
        rdiag[k] = alpha;
    }

    // R is upper triangular: diag in rdiag, above-diagonal in a[c*n + r], r < c.
    auto r_at = [&](std::size_t r, std::size_t c) { return r == c ? rdiag[r] : a[c * n + r]; };

    LeastSquaresFit fit;
    fit.beta.assign(p, 0.0);
    for (std::size_t i = p; i-- > 0;) {
        double s = qty[i];
        for (std::size_t c = i + 1; c < p; ++c) s -= r_at(i, c) * fit.beta[c];
        fit.beta[i] = s / rdiag[i];
    }

    // (X'X)^{-1} = R^{-1} R^{-T}; diag_j = sum_k (R^{-1})_{jk}^2.
    Matrix rinv(p, p);
    for (std::size_t j = 0; j < p; ++j) {
        rinv(j, j) = 1.0 / rdiag[j];
        for (std::size_t i = j; i-- > 0;) {
            double s = 0.0;
            for (std::size_t k = i + 1; k <= j; ++k) s += r_at(i, k) * rinv(k, j);
            rinv(i, j) = -s / rdiag[i];
        }
    }
    fit.xtx_inv_diag.assign(p, 0.0);
    for (std::size_t j = 0; j < p; ++j)
        for (std::size_t k = j; k < p; ++k) fit.xtx_inv_diag[j] += rinv(j, k) * rinv(j, k);

    fit.fitted.assign(n, 0.0);
    fit.residuals.assign(n, 0.0);
    for (std::size_t r = 0; r < n; ++r) {
        double s = 0.0;
        for (std::size_t c = 0; c < p; ++c) s += x(r, c) * fit.beta[c];
        fit.fitted[r] = s;
        fit.residuals[r] = y[r] - s;
        fit.rss += fit.residuals[r] * fit.residuals[r];
    }
    fit.df = n - p;
    return fit;
}

struct SvdResult {
    std::vector<double> sigma;  ///< non-increasing
    Matrix u;                   ///< rows x r, orthonormal columns
    Matrix v;                   ///< cols x r, orthonormal columns
};

namespace svd_impl {

// One-sided Jacobi on the columns of `w` (m x r, column-major in a vector of
// columns). Accumulates the rotations into `rot` (r x r). After convergence the
// columns of w are mutually orthogonal.
inline void jacobi_orthogonalize(std::vector<std::vector<double>>& w, std::vector<std::vector<double>>& rot) {
    const std::size_t r = w.size();
    const std::size_t m = r ? w[0].size() : 0;
    constexpr double tol = 1e-15;
    for (int sweep = 0; sweep < 80; ++sweep) {
        bool rotated = false;
        for (std::size_t i = 0; i + 1 < r; ++i) {
            for (std::size_t j = i + 1; j < r; ++j) {
                double alpha = 0.0, beta = 0.0, gamma = 0.0;
                for (std::size_t k = 0; k < m; ++k) {
                    alpha += w[i][k] * w[i][k];
                    beta += w[j][k] * w[j][k];
                    gamma += w[i][k] * w[j][k];
                }
                if (gamma == 0.0 || std::abs(gamma) <= tol * std::sqrt(alpha * beta)) continue;
                rotated = true;
                const double zeta = (beta - alpha) / (2.0 * gamma);
                const double t = std::copysign(1.0, zeta) / (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = c * t;
                for (std::size_t k = 0; k < m; ++k) {
                    const double wi = w[i][k];
                    const double wj = w[j][k];
                    w[i][k] = c * wi - s * wj;
                    w[j][k] = s * wi + c * wj;
                }
                for (std::size_t k = 0; k < r; ++k) {
                    const double ri = rot[i][k];
                    const double rj = rot[j][k];
                    rot[i][k] = c * ri - s * rj;
                    rot[j][k] = s * ri + c * rj;
                }
            }
        }
        if (!rotated) return;
    }
}

// Extends a set of orthonormal columns (some possibly zero) to an orthonormal set,
// replacing the zero columns by Gram-Schmidt completions from the standard basis.
inline void complete_basis(std::vector<std::vector<double>>& cols, const std::vector<bool>& valid) {
    const std::size_t m = cols.empty() ? 0 : cols[0].size();
    std::size_t next_basis = 0;
    for (std::size_t c = 0; c < cols.size(); ++c) {
        if (valid[c]) continue;
        for (; next_basis < m; ++next_basis) {
            std::vector<double> cand(m, 0.0);
            cand[next_basis] = 1.0;
            for (int pass = 0; pass < 2; ++pass) {
                for (std::size_t o = 0; o < cols.size(); ++o) {
                    if (o == c || (!valid[o] && o > c)) continue;
                    double dot = 0.0;
                    for (std::size_t k = 0; k < m; ++k) dot += cols[o][k] * cand[k];
                    for (std::size_t k = 0; k < m; ++k) cand[k] -= dot * cols[o][k];
                }
            }
            double norm = 0.0;
            for (double v : cand) norm += v * v;
            norm = std::sqrt(norm);
            if (norm > 1e-6) {
                for (auto& v : cand) v /= norm;
                cols[c] = std::move(cand);
                ++next_basis;
                break;
            }
        }
    }
}

} // namespace svd_impl

/// Thin SVD A = U diag(sigma) V' of an m x n matrix, r = min(m, n) components.
/// Columns of U and V are orthonormal even for zero singular values.
inline SvdResult svd(const Matrix& a) {
    // b is r x m with r = min(rows, cols); its rows are rotated until mutually orthogonal.
    const bool transpose = a.rows() < a.cols();
    const Matrix b = transpose ? a : a.transposed();
    const std::size_t r = b.rows();
    const std::size_t m = b.cols();

    std::vector<std::vector<double>> w(r, std::vector<double>(m));
    for (std::size_t i = 0; i < r; ++i)
        for (std::size_t k = 0; k < m; ++k) w[i][k] = b(i, k);
    std::vector<std::vector<double>> rot(r, std::vector<double>(r, 0.0));
    for (std::size_t i = 0; i < r; ++i) rot[i][i] = 1.0;

    // Invariant: W = rot * b with rot orthogonal, so b = rot' W.
    svd_impl::jacobi_orthogonalize(w, rot);

    std::vector<double> sigma(r);
    double smax = 0.0;
    for (std::size_t i = 0; i < r; ++i) {
        double s = 0.0;
        for (double v : w[i]) s += v * v;
        sigma[i] = std::sqrt(s);
        smax = std::max(smax, sigma[i]);
    }
    std::vector<bool> valid(r);
    for (std::size_t i = 0; i < r; ++i) {
        valid[i] = sigma[i] > smax * 1e-14 && sigma[i] > 0.0;
        if (valid[i]) {
            for (auto& v : w[i]) v /= sigma[i];
        } else {
            sigma[i] = 0.0;
            std::fill(w[i].begin(), w[i].end(), 0.0);
        }
    }

    std::vector<std::size_t> order(r);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return sigma[x] > sigma[y]; });

    std::vector<std::vector<double>> long_vecs(r), short_vecs(r);
    std::vector<bool> sorted_valid(r);
    SvdResult out;
    out.sigma.resize(r);
    for (std::size_t k = 0; k < r; ++k) {
        out.sigma[k] = sigma[order[k]];
        long_vecs[k] = w[order[k]];
        short_vecs[k] = rot[order[k]];
        sorted_valid[k] = valid[order[k]];
    }
    svd_impl::complete_basis(long_vecs, sorted_valid);

    // b = sum_k sigma_k (row k of rot)' (normalized row k of W).
    Matrix short_m(r, r), long_m(m, r);
    for (std::size_t k = 0; k < r; ++k) {
        for (std::size_t i = 0; i < r; ++i) short_m(i, k) = short_vecs[k][i];
        for (std::size_t i = 0; i < m; ++i) long_m(i, k) = long_vecs[k][i];
    }
    if (transpose) {
        out.u = std::move(short_m);
        out.v = std::move(long_m);
    } else {
        out.u = std::move(long_m);
        out.v = std::move(short_m);
    }
    return out;
}

/// Solves S x = rhs for symmetric positive definite S with half-bandwidth `bw`.
/// `band[i][d]` holds S(i, i + d) for d = 0..bw.
inline std::vector<double> solve_banded_spd(std::vector<std::vector<double>> band, std::vector<double> rhs,
                                            std::size_t bw) {
    const std::size_t n = rhs.size();
    // Banded Cholesky S = G G'.
    std::vector<std::vector<double>> g(n, std::vector<double>(bw + 1, 0.0));  // g[i][d] = G(i, i-d)
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t d = std::min(bw, i) + 1; d-- > 0;) {
            const std::size_t j = i - d;  // column
            double s = band[j][d];
            for (std::size_t k = (i > bw ? i - bw : 0); k < j; ++k) {
                if (j - k > bw) continue;
                s -= g[i][i - k] * g[j][j - k];
            }
            if (d == 0) {
                if (!(s > 0.0)) throw_degenerate("solve_banded_spd: matrix not positive definite");
                g[i][0] = std::sqrt(s);
            } else {
                g[i][d] = s / g[j][0];
            }
        }
    }
    for (std::size_t i = 0; i < n; ++i) {
        double s = rhs[i];
        for (std::size_t d = 1; d <= std::min(bw, i); ++d) s -= g[i][d] * rhs[i - d];
        rhs[i] = s / g[i][0];
    }
    for (std::size_t i = n; i-- > 0;) {
        double s = rhs[i];
        for (std::size_t d = 1; d <= bw && i + d < n; ++d) s -= g[i + d][d] * rhs[i + d];
        rhs[i] = s / g[i][0];
    }
    return rhs;
}

} // namespace tsdecomp::detail
