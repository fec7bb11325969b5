#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <utility>

#include "errors.hpp"
#include "linalg.hpp"
#include "matrix.hpp"

namespace loodiag {

/// Leverages within this distance of 1 make the (1 - h_ii) deletion
/// denominators meaningless; affected operations throw LeverageOneError.
inline constexpr double kLeverageEps = 1e-8;

/// Fitted linear model. Immutable after construction; keeps the design and
/// response so deletion diagnostics need no re-supply.
struct RegressionFit {
    std::size_t n = 0;
    std::size_t p = 0;
    Vector beta_hat;
    Vector residuals;
    Vector leverage;       // diagonal of the hat matrix
    double sigma2_hat = 0.0;
    Matrix xtx_inverse;
    Matrix design;         // X, retained
    Vector response;       // y, retained

    RegressionFit() : xtx_inverse(1, 1), design(1, 1) {}

    /// Row i of the design as a column vector (1-based observation index).
    Vector row(std::size_t i) const { return design.row(i - 1); }

    void check_index(std::size_t i) const {
        if (i < 1 || i > n) {
            throw IndexOutOfRangeError("observation index " + std::to_string(i) +
                                       " outside 1.." + std::to_string(n));
        }
    }

    /// Leverage for 1-based observation i; throws when the deletion
    /// denominators would be singular.
    double checked_leverage(std::size_t i) const {
        check_index(i);
        const double h = leverage[i - 1];
        if (h >= 1.0 - kLeverageEps) {
            throw LeverageOneError("observation " + std::to_string(i) +
                                   " has leverage " + std::to_string(h) +
                                   "; deletion formulas are singular");
        }
        return h;
    }
};

/// Fit y = X beta + eps by least squares. Requires n > p and full numerical
/// column rank; a perfect fit (zero residual sum of squares) is rejected
/// because every diagnostic divides by sigma^2.
inline RegressionFit fit(const Matrix& x, const Vector& y) {
    const std::size_t n = x.rows();
    const std::size_t p = x.cols();
    if (y.size() != n) {
        throw ShapeMismatchError("response length " + std::to_string(y.size()) +
                                 " does not match row count " + std::to_string(n));
    }
    if (n < p) {
        throw RankDeficientError("fewer observations than coefficients");
    }
    if (n == p) {
        throw DegenerateResidualError("n == p: interpolating fit has no residual variance");
    }

    LeastSquares ls = lstsq_solve(x, y);

    RegressionFit f;
    f.n = n;
    f.p = p;
    f.beta_hat = std::move(ls.beta);
    f.xtx_inverse = std::move(ls.xtx_inverse);
    f.design = x;
    f.response = y;

    f.residuals.resize(n);
    double ssr = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double fitted = 0.0;
        for (std::size_t j = 0; j < p; ++j) fitted += x(i, j) * f.beta_hat[j];
        f.residuals[i] = y[i] - fitted;
        ssr += f.residuals[i] * f.residuals[i];
    }
    // A residual norm at roundoff level relative to ||y|| means the response
    // lies in the column span; sigma^2 would be noise.
    if (ssr <= 1e-28 * dot(y, y)) {
        throw DegenerateResidualError("residual sum of squares is zero; sigma^2 estimate vanishes");
    }
    f.sigma2_hat = ssr / static_cast<double>(n - p);

    // h_ii = x_i^T (X^T X)^{-1} x_i = ||R^{-T} x_i||^2 via one forward
    // substitution with R^T per row.
    const Matrix& r = ls.r;
    f.leverage.resize(n);
    Vector z(p);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t k = 0; k < p; ++k) {
            double s = x(i, k);
            for (std::size_t j = 0; j < k; ++j) s -= r(j, k) * z[j];
            z[k] = s / r(k, k);
        }
        f.leverage[i] = dot(z, z);
    }
    return f;
}

/// Internally studentized residual e_i / (sigma_hat * sqrt(1 - h_ii)),
/// 1-based observation index.
inline double studentized(const RegressionFit& f, std::size_t i) {
    const double h = f.checked_leverage(i);
    if (f.sigma2_hat <= 0.0) throw ZeroVarianceError("sigma^2 estimate is not positive");
    return f.residuals[i - 1] / std::sqrt(f.sigma2_hat * (1.0 - h));
}

}  // namespace loodiag
