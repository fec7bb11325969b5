#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "deletion.hpp"
#include "errors.hpp"
#include "matrix.hpp"
#include "regression.hpp"
#include "rng.hpp"

namespace loodiag {

/// Evaluation of the chi-squared quadratic-form conditions at observation i,
/// with Omega = V_i / (1 - h_ii) and A = X^T X. The quadratic form
/// (1/sigma^2) (dbeta)^T A (dbeta) is chi-squared iff
/// Omega A Omega A Omega = Omega A Omega and tr(A Omega) is a positive
/// integer; both hold together only at h_ii = 1/2.
struct ChiSquareCondition {
    std::size_t i = 0;
    double h = 0.0;
    Matrix omega;                      // V_i / (1 - h)
    Matrix a;                          // X^T X
    double condition1_residual = 0.0;  // ||OAOAO - OAO||_F / ||OAO||_F
    double trace_value = 0.0;          // tr(A Omega), equals h / (1 - h)
    bool satisfied = false;

    ChiSquareCondition() : omega(1, 1), a(1, 1) {}
};

struct MonteCarloResult {
    std::size_t sample_count = 0;
    double ks_statistic = 0.0;
    double p_value = 0.0;
    std::string reference = "chi-squared, 1 degree of freedom";
    std::uint64_t seed = 0;
};

/// CDF of the chi-squared distribution with one degree of freedom.
inline double chisq1_cdf(double q) {
    if (q <= 0.0) return 0.0;
    return std::erf(std::sqrt(q / 2.0));
}

/// Evaluate both chi-squared quadratic-form conditions for observation i by
/// explicit matrix arithmetic. The closed forms (h^2/(1-h)^3) V_i and
/// (h/(1-h)^2) V_i are checked against the explicit products before anything
/// is reported.
inline ChiSquareCondition chi_square_condition(const RegressionFit& f, std::size_t i) {
    constexpr double kTiny = 1e-300;
    ChiSquareCondition out;
    out.i = i;
    out.h = f.checked_leverage(i);

    const Matrix v = v_matrix(f, i);
    out.omega = (1.0 / (1.0 - out.h)) * v;
    out.a = f.design.transpose() * f.design;

    const Matrix oao = out.omega * out.a * out.omega;
    const Matrix oaoao = oao * out.a * out.omega;

    const double h = out.h;
    const Matrix closed_oao = (h / ((1.0 - h) * (1.0 - h))) * v;
    const Matrix closed_oaoao = (h * h / ((1.0 - h) * (1.0 - h) * (1.0 - h))) * v;
    const double rel2 = frobenius_norm(oao - closed_oao) / std::max(frobenius_norm(closed_oao), kTiny);
    const double rel1 =
        frobenius_norm(oaoao - closed_oaoao) / std::max(frobenius_norm(closed_oaoao), kTiny);
    if ((frobenius_norm(closed_oao) > 0.0 && rel2 > 1e-9) ||
        (frobenius_norm(closed_oaoao) > 0.0 && rel1 > 1e-9)) {
        throw Error("internal check failed: explicit Omega-A products disagree with closed forms");
    }

    out.condition1_residual = frobenius_norm(oaoao - oao) / std::max(frobenius_norm(oao), kTiny);
    out.trace_value = trace(out.a * out.omega);

    const double rounded = std::round(out.trace_value);
    out.satisfied = out.condition1_residual <= 1e-8 &&
                    std::fabs(out.trace_value - rounded) <= 1e-8 && rounded >= 1.0;
    return out;
}

/// Two-observation, one-predictor design whose first leverage equals h:
/// rows (sqrt(h), sqrt(1-h)) give h_11 = h / (h + (1-h)). Response (1, -1)
/// keeps the residual sum of squares positive.
inline RegressionFit synthetic_leverage_fit(double h) {
    if (!(h > 0.0 && h < 1.0)) {
        throw InvalidLeverageError("leverage must lie in (0,1)");
    }
    Matrix x(2, 1);
    x(0, 0) = std::sqrt(h);
    x(1, 0) = std::sqrt(1.0 - h);
    return fit(x, Vector{1.0, -1.0});
}

/// Draw the scaled quadratic form Q = (1/sigma^2) (dbeta)^T X^T X (dbeta)
/// where dbeta/sigma ~ N_p(0, V_i/(1-h)). By the rank-one structure of V_i
/// this reduces to Q = (h/(1-h)) Z^2 with Z standard normal.
inline Vector simulate_quadratic_form(double h, std::size_t sample_count, std::uint64_t seed) {
    if (!(h > 0.0 && h < 1.0)) {
        throw InvalidLeverageError("leverage must lie in (0,1)");
    }
    if (sample_count < 1) {
        throw TooFewSamplesError("sample count must be at least 1");
    }
    const double scale = h / (1.0 - h);
    Rng rng(seed);
    Vector out(sample_count);
    for (double& q : out) {
        const double z = rng.normal();
        q = scale * z * z;
    }
    return out;
}

/// One-sample Kolmogorov-Smirnov test of `samples` against chi-squared(1).
/// The p-value uses the asymptotic Kolmogorov series truncated at 100 terms,
/// adequate for 100 samples and up.
inline MonteCarloResult ks_test_chisq1(const Vector& samples, std::uint64_t seed = 0) {
    const std::size_t n = samples.size();
    if (n < 100) {
        throw TooFewSamplesError("KS test needs at least 100 samples, got " + std::to_string(n));
    }
    Vector sorted = samples;
    std::sort(sorted.begin(), sorted.end());

    double d = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double cdf = chisq1_cdf(sorted[i]);
        const double lo = cdf - static_cast<double>(i) / static_cast<double>(n);
        const double hi = static_cast<double>(i + 1) / static_cast<double>(n) - cdf;
        d = std::max({d, lo, hi});
    }

    const double lambda = std::sqrt(static_cast<double>(n)) * d;
    double p = 0.0;
    for (int k = 1; k <= 100; ++k) {
        const double term = std::exp(-2.0 * k * k * lambda * lambda);
        p += (k % 2 == 1) ? term : -term;
    }
    p = std::clamp(2.0 * p, 0.0, 1.0);

    MonteCarloResult out;
    out.sample_count = n;
    out.ks_statistic = d;
    out.p_value = p;
    out.seed = seed;
    return out;
}

/// Monte Carlo check of the column-space concentration: samples of
/// beta_hat - beta_hat_(i) drawn by the spectral construction (randomness only
/// along the nonzero-eigenvalue direction of V_i) must stay on the line
/// spanned by (X^T X)^{-1} x_i. Returns the largest relative orthogonal
/// component over all samples.
inline double column_space_check(const RegressionFit& f, std::size_t i, std::size_t sample_count,
                                 std::uint64_t seed) {
    if (sample_count < 1) {
        throw TooFewSamplesError("sample count must be at least 1");
    }
    const double h = f.checked_leverage(i);
    const Vector v = f.xtx_inverse * f.row(i);
    const double lambda = dot(v, v);
    if (lambda == 0.0) return 0.0;  // zero row: the change is identically zero

    const std::size_t p = f.p;
    Vector u(p);
    const double vn = norm(v);
    for (std::size_t k = 0; k < p; ++k) u[k] = v[k] / vn;
    const double scale = std::sqrt(f.sigma2_hat * lambda / (1.0 - h));

    Rng rng(seed);
    double worst = 0.0;
    Vector db(p), orth(p);
    for (std::size_t s = 0; s < sample_count; ++s) {
        const double amp = scale * rng.normal();
        for (std::size_t k = 0; k < p; ++k) db[k] = amp * u[k];
        const double along = dot(db, u);
        for (std::size_t k = 0; k < p; ++k) orth[k] = db[k] - along * u[k];
        const double dn = norm(db);
        if (dn > 0.0) worst = std::max(worst, norm(orth) / dn);
    }
    return worst;
}

}  // namespace loodiag
