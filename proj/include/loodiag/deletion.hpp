#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "errors.hpp"
#include "linalg.hpp"
#include "matrix.hpp"
#include "regression.hpp"

namespace loodiag {

/// Per-observation deletion artifacts. delta_beta is the coefficient change
/// from deleting observation i; v_eigvec = (X^T X)^{-1} x_i spans the only
/// direction the change can take, with v_eigenvalue = ||v_eigvec||^2 the sole
/// nonzero eigenvalue of the deletion covariance factor V_i.
struct DeletionCase {
    std::size_t i = 0;
    Vector delta_beta;
    double v_eigenvalue = 0.0;
    Vector v_eigvec;
    double leverage = 0.0;
};

struct DiagnosticsRow {
    std::size_t i = 0;   // 1-based observation index
    double e = 0.0;      // residual
    double h = 0.0;      // leverage
    double t2 = 0.0;     // squared internally studentized residual
    double cook_d = 0.0;
    double k = 0.0;      // signed coefficient-space influence
};

struct DiagnosticsTable {
    std::vector<DiagnosticsRow> rows;        // observation order
    std::vector<std::size_t> order_by_abs_k; // 1-based indices, |K| descending
    std::vector<std::size_t> order_by_cook;  // 1-based indices, D descending
};

/// Cook's distance split along the eigenvectors of X^T X:
/// components[k] = l_k [(delta beta)^T g_k]^2 / (p sigma^2), descending l_k.
struct CookDecomposition {
    std::size_t i = 0;
    Vector components;
    Vector coords;       // (delta beta)^T g_k per axis
    SpectralDecomp eigen;
};

struct VPseudoinverse {
    Matrix value;
    /// Set when x_i is numerically zero: V_i = 0 and its pseudoinverse is the
    /// zero matrix, which is returned rather than treated as an error.
    bool degenerate = false;
};

/// Closed-form change in the coefficient estimate from deleting observation i
/// (Miller's identity): (X^T X)^{-1} x_i e_i / (1 - h_ii). 1-based index.
inline Vector delta_beta(const RegressionFit& f, std::size_t i) {
    const double h = f.checked_leverage(i);
    const double scale = f.residuals[i - 1] / (1.0 - h);
    Vector v = f.xtx_inverse * f.row(i);
    for (double& c : v) c *= scale;
    return v;
}

/// Literal refit without row i; reference implementation for delta_beta.
inline Vector delta_beta_bruteforce(const RegressionFit& f, std::size_t i) {
    f.check_index(i);
    const std::size_t n = f.n;
    const std::size_t p = f.p;
    Matrix xr(n - 1, p);
    Vector yr(n - 1);
    std::size_t r = 0;
    for (std::size_t row = 0; row < n; ++row) {
        if (row == i - 1) continue;
        for (std::size_t c = 0; c < p; ++c) xr(r, c) = f.design(row, c);
        yr[r] = f.response[row];
        ++r;
    }
    Vector beta_del;
    try {
        beta_del = lstsq_solve(xr, yr).beta;
    } catch (const RankDeficientError&) {
        throw RankDeficientError("design is rank deficient after deleting observation " +
                                 std::to_string(i));
    }
    Vector out(p);
    for (std::size_t c = 0; c < p; ++c) out[c] = f.beta_hat[c] - beta_del[c];
    return out;
}

/// V_i = (X^T X)^{-1} x_i x_i^T (X^T X)^{-1}, the rank-one factor of
/// cov(beta_hat - beta_hat_(i)).
inline Matrix v_matrix(const RegressionFit& f, std::size_t i) {
    f.check_index(i);
    const Vector v = f.xtx_inverse * f.row(i);
    return outer(v, v);
}

inline DeletionCase deletion_case(const RegressionFit& f, std::size_t i) {
    DeletionCase dc;
    dc.i = i;
    dc.delta_beta = delta_beta(f, i);
    dc.v_eigvec = f.xtx_inverse * f.row(i);
    dc.v_eigenvalue = dot(dc.v_eigvec, dc.v_eigvec);
    dc.leverage = f.leverage[i - 1];
    return dc;
}

/// Moore-Penrose inverse of V_i in closed form:
/// V_i^+ = [x_i^T (X^T X)^{-2} x_i]^{-2} V_i. A numerically zero row x_i is
/// reported through the degenerate flag and yields the zero matrix.
inline VPseudoinverse v_pseudoinverse(const RegressionFit& f, std::size_t i) {
    f.check_index(i);
    const Vector v = f.xtx_inverse * f.row(i);
    const double lambda = dot(v, v);

    // Scale for "x_i numerically zero": the largest such eigenvalue over all rows.
    double lambda_max = 0.0;
    for (std::size_t row = 1; row <= f.n; ++row) {
        const Vector w = f.xtx_inverse * f.row(row);
        lambda_max = std::max(lambda_max, dot(w, w));
    }
    if (lambda <= 1e-14 * lambda_max) {
        return VPseudoinverse{Matrix(f.p, f.p), true};
    }
    const double inv_l2 = 1.0 / (lambda * lambda);
    return VPseudoinverse{inv_l2 * outer(v, v), false};
}

/// Normalized squared distance between beta_hat and beta_hat_(i) under the
/// Moore-Penrose inverse of the estimated deletion covariance; equals the
/// squared internally studentized residual e_i^2 / (sigma^2 (1 - h_ii)).
inline double normalized_distance(const RegressionFit& f, std::size_t i) {
    const double h = f.checked_leverage(i);
    if (f.sigma2_hat <= 0.0) throw ZeroVarianceError("sigma^2 estimate is not positive");
    const double e = f.residuals[i - 1];
    return e * e / (f.sigma2_hat * (1.0 - h));
}

/// Cook's distance D_i = (1/p) (h_ii / (1 - h_ii)) e_i^2 / (sigma^2 (1 - h_ii)).
inline double cooks_distance(const RegressionFit& f, std::size_t i) {
    const double h = f.checked_leverage(i);
    return normalized_distance(f, i) * h / (static_cast<double>(f.p) * (1.0 - h));
}

/// The scalar influence diagnostic:
/// K_i = (e_i / (1 - h_ii)) ||(X^T X)^{-1} x_i||, the coordinate of the
/// coefficient change along the one direction it can occupy. Signed; rank by
/// absolute value.
inline double k_statistic(const RegressionFit& f, std::size_t i) {
    const double h = f.checked_leverage(i);
    const Vector v = f.xtx_inverse * f.row(i);
    return f.residuals[i - 1] / (1.0 - h) * norm(v);
}

/// K statistic for a fit of the transformed design X A, mapped back to the
/// coordinates of the original design. The eigenvector direction of the
/// transformed fit is (A^T X^T X A)^{-1} A^T x_i = A^{-1} (X^T X)^{-1} x_i;
/// multiplying by A recovers the original direction, so the result matches
/// k_statistic of the untransformed fit. A must be nonsingular.
inline double k_statistic_transformed(const RegressionFit& f, std::size_t i, const Matrix& a) {
    if (a.rows() != f.p || a.cols() != f.p) {
        throw ShapeMismatchError("transform must be p x p");
    }
    // Rank check on A at the library-wide tolerance.
    {
        Matrix work = a;
        Vector dummy(a.rows(), 0.0);
        detail::householder_qr_inplace(work, dummy);
        const double tol = kRankTolFactor * detail::largest_column_norm(a);
        for (std::size_t k = 0; k < a.cols(); ++k) {
            if (std::fabs(work(k, k)) <= tol) {
                throw SingularTransformError("transform matrix is numerically singular");
            }
        }
    }
    const double h = f.checked_leverage(i);
    const Vector v = a * (f.xtx_inverse * f.row(i));
    return f.residuals[i - 1] / (1.0 - h) * norm(v);
}

/// Split D_i into its per-axis terms along the eigenvectors of X^T X.
inline CookDecomposition cook_decomposition(const RegressionFit& f, std::size_t i) {
    CookDecomposition out{i, Vector(f.p), Vector(f.p), spectral(f.design.transpose() * f.design)};
    const Vector db = delta_beta(f, i);
    const double denom = static_cast<double>(f.p) * f.sigma2_hat;
    for (std::size_t k = 0; k < f.p; ++k) {
        double coord = 0.0;
        for (std::size_t r = 0; r < f.p; ++r) coord += db[r] * out.eigen.eigenvectors(r, k);
        out.coords[k] = coord;
        out.components[k] = out.eigen.eigenvalues[k] * coord * coord / denom;
    }
    return out;
}

namespace detail {

/// Descending sort of 1-based indices by `value`; ties within 1e-12
/// (relative) fall back to ascending index.
inline std::vector<std::size_t> influence_order(const std::vector<double>& value) {
    std::vector<std::size_t> idx(value.size());
    std::iota(idx.begin(), idx.end(), std::size_t{1});
    std::stable_sort(idx.begin(), idx.end(), [&value](std::size_t l, std::size_t r) {
        return value[l - 1] > value[r - 1];
    });
    const auto tied = [&value](std::size_t l, std::size_t r) {
        const double a = value[l - 1], b = value[r - 1];
        return std::fabs(a - b) <= 1e-12 * std::max({1.0, std::fabs(a), std::fabs(b)});
    };
    std::size_t g = 0;
    while (g < idx.size()) {
        std::size_t end = g + 1;
        while (end < idx.size() && tied(idx[g], idx[end])) ++end;
        std::sort(idx.begin() + static_cast<std::ptrdiff_t>(g),
                  idx.begin() + static_cast<std::ptrdiff_t>(end));
        g = end;
    }
    return idx;
}

}  // namespace detail

/// All per-observation diagnostics in observation order, plus the influence
/// orderings by |K| and by D. Output is identical to per-i evaluation.
inline DiagnosticsTable diagnostics_table(const RegressionFit& f) {
    DiagnosticsTable t;
    t.rows.reserve(f.n);
    std::vector<double> abs_k(f.n), cook(f.n);
    for (std::size_t i = 1; i <= f.n; ++i) {
        DiagnosticsRow row;
        row.i = i;
        row.e = f.residuals[i - 1];
        row.h = f.leverage[i - 1];
        row.t2 = normalized_distance(f, i);
        row.cook_d = cooks_distance(f, i);
        row.k = k_statistic(f, i);
        abs_k[i - 1] = std::fabs(row.k);
        cook[i - 1] = row.cook_d;
        t.rows.push_back(row);
    }
    t.order_by_abs_k = detail::influence_order(abs_k);
    t.order_by_cook = detail::influence_order(cook);
    return t;
}

}  // namespace loodiag
