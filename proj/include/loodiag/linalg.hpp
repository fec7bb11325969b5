#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <string>
#include <vector>

#include "errors.hpp"
#include "matrix.hpp"

namespace loodiag {

/// Numerical rank threshold: a triangular diagonal (or singular value) below
/// kRankTolFactor times the largest column norm counts as zero.
inline constexpr double kRankTolFactor = 1e-10;

struct LeastSquares {
    Vector beta;
    Matrix xtx_inverse;
    /// Upper-triangular factor R of X = QR (p x p). (X^T X)^{-1} = R^{-1} R^{-T},
    /// so leverages can be computed by one triangular solve per row.
    Matrix r;
};

struct SpectralDecomp {
    Vector eigenvalues;   // sorted descending
    Matrix eigenvectors;  // column k pairs with eigenvalues[k]; orthogonal
};

namespace detail {

inline double largest_column_norm(const Matrix& x) {
    double best = 0.0;
    for (std::size_t c = 0; c < x.cols(); ++c) {
        double s = 0.0;
        for (std::size_t r = 0; r < x.rows(); ++r) s += x(r, c) * x(r, c);
        best = std::max(best, std::sqrt(s));
    }
    return best;
}

/// Householder QR on a working copy of X. Overwrites `work` with R in the
/// upper triangle and applies the same reflections to y, leaving Q^T y in it.
inline void householder_qr_inplace(Matrix& work, Vector& y) {
    const std::size_t n = work.rows();
    const std::size_t p = work.cols();
    Vector v(n);
    for (std::size_t k = 0; k < p; ++k) {
        double colnorm = 0.0;
        for (std::size_t i = k; i < n; ++i) colnorm += work(i, k) * work(i, k);
        colnorm = std::sqrt(colnorm);
        if (colnorm == 0.0) continue;  // caller's rank check rejects this column

        const double alpha = work(k, k) >= 0.0 ? -colnorm : colnorm;
        double vnorm2 = 0.0;
        for (std::size_t i = k; i < n; ++i) {
            v[i] = work(i, k);
            if (i == k) v[i] -= alpha;
            vnorm2 += v[i] * v[i];
        }
        work(k, k) = alpha;
        for (std::size_t i = k + 1; i < n; ++i) work(i, k) = 0.0;
        if (vnorm2 == 0.0) continue;

        for (std::size_t c = k + 1; c < p; ++c) {
            double proj = 0.0;
            for (std::size_t i = k; i < n; ++i) proj += v[i] * work(i, c);
            const double f = 2.0 * proj / vnorm2;
            for (std::size_t i = k; i < n; ++i) work(i, c) -= f * v[i];
        }
        double proj = 0.0;
        for (std::size_t i = k; i < n; ++i) proj += v[i] * y[i];
        const double f = 2.0 * proj / vnorm2;
        for (std::size_t i = k; i < n; ++i) y[i] -= f * v[i];
    }
}

/// Inverse of an upper-triangular p x p matrix by back substitution.
inline Matrix upper_triangular_inverse(const Matrix& r) {
    const std::size_t p = r.rows();
    Matrix inv(p, p);
    for (std::size_t c = 0; c < p; ++c) {
        // solve R z = e_c
        for (std::size_t ii = p; ii-- > 0;) {
            double s = (ii == c) ? 1.0 : 0.0;
            for (std::size_t j = ii + 1; j < p; ++j) s -= r(ii, j) * inv(j, c);
            inv(ii, c) = s / r(ii, ii);
        }
    }
    return inv;
}

}  // namespace detail

/// Least-squares solve of min ||y - X b|| by Householder QR; never forms or
/// inverts the normal equations directly. Also returns (X^T X)^{-1} derived
/// from the triangular factor. Requires n >= p and full numerical column rank.
inline LeastSquares lstsq_solve(const Matrix& x, const Vector& y) {
    const std::size_t n = x.rows();
    const std::size_t p = x.cols();
    if (y.size() != n) {
        throw ShapeMismatchError("response length " + std::to_string(y.size()) +
                                 " does not match row count " + std::to_string(n));
    }
    if (n < p) {
        throw RankDeficientError("fewer observations than coefficients (n=" + std::to_string(n) +
                                 ", p=" + std::to_string(p) + ")");
    }
    check_finite(y, "response vector");

    const double rank_tol = kRankTolFactor * detail::largest_column_norm(x);
    Matrix work = x;
    Vector qty = y;
    detail::householder_qr_inplace(work, qty);

    Matrix r(p, p);
    for (std::size_t i = 0; i < p; ++i)
        for (std::size_t j = i; j < p; ++j) r(i, j) = work(i, j);
    for (std::size_t k = 0; k < p; ++k) {
        if (std::fabs(r(k, k)) <= rank_tol) {
            throw RankDeficientError("design matrix is numerically rank deficient (column " +
                                     std::to_string(k + 1) + ")");
        }
    }

    Vector beta(p);
    for (std::size_t ii = p; ii-- > 0;) {
        double s = qty[ii];
        for (std::size_t j = ii + 1; j < p; ++j) s -= r(ii, j) * beta[j];
        beta[ii] = s / r(ii, ii);
    }

    const Matrix rinv = detail::upper_triangular_inverse(r);
    return LeastSquares{std::move(beta), rinv * rinv.transpose(), std::move(r)};
}

/// Spectral decomposition of a symmetric matrix by cyclic Jacobi rotations.
/// Eigenvalues come back descending; the iteration is capped at 100 sweeps.
inline SpectralDecomp spectral(const Matrix& s) {
    const std::size_t p = s.rows();
    if (s.cols() != p) throw ShapeMismatchError("spectral decomposition needs a square matrix");
    const double scale = std::max(1.0, max_abs(s));
    for (std::size_t i = 0; i < p; ++i) {
        for (std::size_t j = i + 1; j < p; ++j) {
            if (std::fabs(s(i, j) - s(j, i)) > 1e-12 * scale) {
                throw NotSymmetricError("matrix is not symmetric at entry (" + std::to_string(i + 1) +
                                        "," + std::to_string(j + 1) + ")");
            }
        }
    }

    Matrix a = s;
    Matrix v = Matrix::identity(p);
    const double fr = frobenius_norm(s);
    const double off_tol = 1e-14 * std::max(fr, 1e-300);
    constexpr int kMaxSweeps = 100;

    bool converged = false;
    for (int sweep = 0; sweep < kMaxSweeps && !converged; ++sweep) {
        double off = 0.0;
        for (std::size_t i = 0; i < p; ++i)
            for (std::size_t j = i + 1; j < p; ++j) off += 2.0 * a(i, j) * a(i, j);
        if (std::sqrt(off) <= off_tol) {
            converged = true;
            break;
        }
        for (std::size_t i = 0; i < p; ++i) {
            for (std::size_t j = i + 1; j < p; ++j) {
                const double apq = a(i, j);
                if (std::fabs(apq) <= off_tol / std::max<std::size_t>(p, 1)) continue;
                const double theta = (a(j, j) - a(i, i)) / (2.0 * apq);
                const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                                 (std::fabs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double sn = t * c;
                for (std::size_t k = 0; k < p; ++k) {
                    const double aki = a(k, i), akj = a(k, j);
                    a(k, i) = c * aki - sn * akj;
                    a(k, j) = sn * aki + c * akj;
                }
                for (std::size_t k = 0; k < p; ++k) {
                    const double aik = a(i, k), ajk = a(j, k);
                    a(i, k) = c * aik - sn * ajk;
                    a(j, k) = sn * aik + c * ajk;
                }
                for (std::size_t k = 0; k < p; ++k) {
                    const double vki = v(k, i), vkj = v(k, j);
                    v(k, i) = c * vki - sn * vkj;
                    v(k, j) = sn * vki + c * vkj;
                }
            }
        }
    }
    if (!converged) {
        double off = 0.0;
        for (std::size_t i = 0; i < p; ++i)
            for (std::size_t j = i + 1; j < p; ++j) off += 2.0 * a(i, j) * a(i, j);
        if (std::sqrt(off) > off_tol) {
            throw NonConvergenceError("Jacobi eigensolver did not converge in 100 sweeps");
        }
    }

    std::vector<std::size_t> order(p);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(),
              [&a](std::size_t l, std::size_t r) { return a(l, l) > a(r, r); });

    SpectralDecomp out{Vector(p), Matrix(p, p)};
    for (std::size_t k = 0; k < p; ++k) {
        out.eigenvalues[k] = a(order[k], order[k]);
        for (std::size_t r = 0; r < p; ++r) out.eigenvectors(r, k) = v(r, order[k]);
    }
    return out;
}

/// Moore-Penrose pseudoinverse of an arbitrary matrix via one-sided Jacobi
/// SVD. Singular values below kRankTolFactor times the largest are truncated.
/// Intended as an independent oracle for the closed-form rank-one inverses.
inline Matrix pseudoinverse(const Matrix& a) {
    if (a.rows() < a.cols()) return pseudoinverse(a.transpose()).transpose();

    const std::size_t m = a.rows();
    const std::size_t n = a.cols();
    Matrix w = a;
    Matrix v = Matrix::identity(n);
    constexpr int kMaxSweeps = 100;

    bool converged = false;
    for (int sweep = 0; sweep < kMaxSweeps && !converged; ++sweep) {
        converged = true;
        for (std::size_t j = 0; j < n; ++j) {
            for (std::size_t k = j + 1; k < n; ++k) {
                double ajj = 0.0, akk = 0.0, ajk = 0.0;
                for (std::size_t i = 0; i < m; ++i) {
                    ajj += w(i, j) * w(i, j);
                    akk += w(i, k) * w(i, k);
                    ajk += w(i, j) * w(i, k);
                }
                if (std::fabs(ajk) <= 1e-15 * std::sqrt(ajj * akk) || ajk == 0.0) continue;
                converged = false;
                const double zeta = (akk - ajj) / (2.0 * ajk);
                const double t = (zeta >= 0.0 ? 1.0 : -1.0) /
                                 (std::fabs(zeta) + std::sqrt(1.0 + zeta * zeta));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double sn = c * t;
                for (std::size_t i = 0; i < m; ++i) {
                    const double wij = w(i, j), wik = w(i, k);
                    w(i, j) = c * wij - sn * wik;
                    w(i, k) = sn * wij + c * wik;
                }
                for (std::size_t i = 0; i < n; ++i) {
                    const double vij = v(i, j), vik = v(i, k);
                    v(i, j) = c * vij - sn * vik;
                    v(i, k) = sn * vij + c * vik;
                }
            }
        }
    }
    if (!converged) throw NonConvergenceError("Jacobi SVD did not converge in 100 sweeps");

    Vector sigma(n, 0.0);
    double smax = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        double s = 0.0;
        for (std::size_t i = 0; i < m; ++i) s += w(i, j) * w(i, j);
        sigma[j] = std::sqrt(s);
        smax = std::max(smax, sigma[j]);
    }

    Matrix pinv(n, m);  // stays all-zero for the zero matrix
    if (smax == 0.0) return pinv;
    const double cutoff = kRankTolFactor * smax;
    for (std::size_t j = 0; j < n; ++j) {
        if (sigma[j] <= cutoff) continue;
        const double inv_s2 = 1.0 / (sigma[j] * sigma[j]);
        // pinv += v_j (w_j / sigma_j^2)^T
        for (std::size_t r = 0; r < n; ++r)
            for (std::size_t c = 0; c < m; ++c) pinv(r, c) += v(r, j) * w(c, j) * inv_s2;
    }
    return pinv;
}

}  // namespace loodiag
