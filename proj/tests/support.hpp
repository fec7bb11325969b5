#pragma once

// Shared helpers for the test suites. The solvers here are deliberately
// independent of the library's QR/Jacobi paths so they can serve as oracles.

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include <loodiag/loodiag.hpp>

namespace testsupport {

using loodiag::Matrix;
using loodiag::Vector;

/// Dense linear solve by Gaussian elimination with full pivoting. Oracle for
/// the QR least-squares path (via the normal equations) and for inverting
/// small covariance blocks in tests.
inline Vector solve_full_pivot(Matrix a, Vector b) {
    const std::size_t n = a.rows();
    if (a.cols() != n || b.size() != n) throw std::invalid_argument("solve_full_pivot: shape");

    std::vector<std::size_t> col_of(n);
    for (std::size_t j = 0; j < n; ++j) col_of[j] = j;

    for (std::size_t k = 0; k < n; ++k) {
        std::size_t pr = k, pc = k;
        double best = 0.0;
        for (std::size_t r = k; r < n; ++r) {
            for (std::size_t c = k; c < n; ++c) {
                if (std::fabs(a(r, c)) > best) {
                    best = std::fabs(a(r, c));
                    pr = r;
                    pc = c;
                }
            }
        }
        if (best == 0.0) throw std::runtime_error("solve_full_pivot: singular matrix");
        if (pr != k) {
            for (std::size_t c = 0; c < n; ++c) std::swap(a(k, c), a(pr, c));
            std::swap(b[k], b[pr]);
        }
        if (pc != k) {
            for (std::size_t r = 0; r < n; ++r) std::swap(a(r, k), a(r, pc));
            std::swap(col_of[k], col_of[pc]);
        }
        for (std::size_t r = k + 1; r < n; ++r) {
            const double f = a(r, k) / a(k, k);
            if (f == 0.0) continue;
            for (std::size_t c = k; c < n; ++c) a(r, c) -= f * a(k, c);
            b[r] -= f * b[k];
        }
    }

    Vector z(n);
    for (std::size_t ii = n; ii-- > 0;) {
        double s = b[ii];
        for (std::size_t j = ii + 1; j < n; ++j) s -= a(ii, j) * z[j];
        z[ii] = s / a(ii, ii);
    }
    Vector x(n);
    for (std::size_t j = 0; j < n; ++j) x[col_of[j]] = z[j];
    return x;
}

/// Least squares through the normal equations and the full-pivot solver.
inline Vector lstsq_oracle(const Matrix& x, const Vector& y) {
    return solve_full_pivot(x.transpose() * x, x.transpose() * y);
}

/// Inverse of a small nonsingular matrix through the full-pivot solver.
inline Matrix invert_oracle(const Matrix& a) {
    const std::size_t n = a.rows();
    Matrix inv(n, n);
    for (std::size_t c = 0; c < n; ++c) {
        Vector e(n, 0.0);
        e[c] = 1.0;
        Vector col = solve_full_pivot(a, e);
        for (std::size_t r = 0; r < n; ++r) inv(r, c) = col[r];
    }
    return inv;
}

struct RandomInstance {
    Matrix x;
    Vector y;
};

/// Random regression instance: n in [6,30], p in [1,5], entries U(-1,1).
/// Redraws until the design is comfortably full rank so deletion refits stay
/// well posed.
inline RandomInstance random_instance(std::uint64_t seed) {
    loodiag::Rng rng(seed);
    for (int attempt = 0; attempt < 100; ++attempt) {
        const std::size_t n = rng.uniform_int(6, 30);
        const std::size_t p = rng.uniform_int(1, 5);
        Matrix x(n, p);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < p; ++j) x(i, j) = rng.uniform_symmetric();
        Vector y(n);
        for (double& v : y) v = rng.uniform_symmetric();
        try {
            loodiag::LeastSquares ls = loodiag::lstsq_solve(x, y);
            double min_diag = 1e300, max_colnorm = 0.0;
            for (std::size_t k = 0; k < p; ++k) {
                min_diag = std::min(min_diag, std::fabs(ls.r(k, k)));
                double s = 0.0;
                for (std::size_t i = 0; i < n; ++i) s += x(i, k) * x(i, k);
                max_colnorm = std::max(max_colnorm, std::sqrt(s));
            }
            if (min_diag > 1e-6 * max_colnorm) return RandomInstance{std::move(x), std::move(y)};
        } catch (const loodiag::RankDeficientError&) {
        }
    }
    throw std::runtime_error("random_instance: no well-conditioned draw in 100 attempts");
}

/// Random p x p orthogonal matrix from Gram-Schmidt on normal draws.
inline Matrix random_orthogonal(std::size_t p, std::uint64_t seed) {
    loodiag::Rng rng(seed);
    for (int attempt = 0; attempt < 100; ++attempt) {
        Matrix q(p, p);
        bool ok = true;
        for (std::size_t c = 0; c < p && ok; ++c) {
            Vector v(p);
            for (double& e : v) e = rng.normal();
            for (std::size_t prev = 0; prev < c; ++prev) {
                double proj = 0.0;
                for (std::size_t r = 0; r < p; ++r) proj += v[r] * q(r, prev);
                for (std::size_t r = 0; r < p; ++r) v[r] -= proj * q(r, prev);
            }
            const double nv = loodiag::norm(v);
            if (nv < 1e-8) {
                ok = false;
                break;
            }
            for (std::size_t r = 0; r < p; ++r) q(r, c) = v[r] / nv;
        }
        if (ok) return q;
    }
    throw std::runtime_error("random_orthogonal: degenerate draws");
}

inline bool close_rel(double a, double b, double tol) {
    const double scale = std::max({std::fabs(a), std::fabs(b), 1e-300});
    return std::fabs(a - b) <= tol * scale;
}

/// Per-component comparison at a tolerance relative to the larger vector.
inline bool close_rel(const Vector& a, const Vector& b, double tol) {
    if (a.size() != b.size()) return false;
    const double scale = std::max({loodiag::max_abs(a), loodiag::max_abs(b), 1e-300});
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (std::fabs(a[i] - b[i]) > tol * scale) return false;
    }
    return true;
}

inline bool close_rel(const Matrix& a, const Matrix& b, double tol) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) return false;
    const double scale = std::max({loodiag::max_abs(a), loodiag::max_abs(b), 1e-300});
    for (std::size_t r = 0; r < a.rows(); ++r)
        for (std::size_t c = 0; c < a.cols(); ++c)
            if (std::fabs(a(r, c) - b(r, c)) > tol * scale) return false;
    return true;
}

}  // namespace testsupport
