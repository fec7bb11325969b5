#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>

#include <loodiag/loodiag.hpp>

#include "support.hpp"

using namespace loodiag;
using testsupport::close_rel;

namespace {

RegressionFit mean_fit_123() {
    Matrix x(3, 1, Vector(3, 1.0));
    return fit(x, Vector{1.0, 2.0, 3.0});
}

}  // namespace

TEST_CASE("intercept-only fit of (1,2,3)", "[regression]") {
    const RegressionFit f = mean_fit_123();
    REQUIRE(f.p == 1);
    CHECK_THAT(f.beta_hat[0], Catch::Matchers::WithinAbs(2.0, 1e-12));
    CHECK_THAT(f.residuals[0], Catch::Matchers::WithinAbs(-1.0, 1e-12));
    CHECK_THAT(f.residuals[1], Catch::Matchers::WithinAbs(0.0, 1e-12));
    CHECK_THAT(f.residuals[2], Catch::Matchers::WithinAbs(1.0, 1e-12));
    for (double h : f.leverage) CHECK_THAT(h, Catch::Matchers::WithinAbs(1.0 / 3.0, 1e-12));
    CHECK_THAT(f.sigma2_hat, Catch::Matchers::WithinAbs(1.0, 1e-12));
}

TEST_CASE("interpolating and degenerate fits are rejected", "[regression]") {
    CHECK_THROWS_AS(fit(Matrix::identity(2), Vector{1.0, 2.0}), DegenerateResidualError);

    // n > p but the response lies exactly in the column span
    Matrix x(3, 1, Vector{1.0, 2.0, 3.0});
    CHECK_THROWS_AS(fit(x, Vector{2.0, 4.0, 6.0}), DegenerateResidualError);

    CHECK_THROWS_AS(fit(Matrix(3, 1), Vector{1.0, 2.0}), ShapeMismatchError);
}

TEST_CASE("fit invariants on the bundled datasets", "[regression]") {
    for (const std::string& name : builtin_names()) {
        const Dataset ds = builtin(name);
        const Matrix x = design_matrix(ds);
        const RegressionFit f = fit(x, ds.y);

        const double trace_h = std::accumulate(f.leverage.begin(), f.leverage.end(), 0.0);
        CHECK_THAT(trace_h, Catch::Matchers::WithinAbs(static_cast<double>(f.p), 1e-8));
        for (double h : f.leverage) {
            CHECK(h >= -1e-10);
            CHECK(h <= 1.0 + 1e-10);
        }
        const Vector xte = x.transpose() * f.residuals;
        for (double v : xte) CHECK(std::fabs(v) <= 1e-8 * norm(f.response));
        double ssr = 0.0;
        for (double e : f.residuals) ssr += e * e;
        CHECK(f.sigma2_hat == ssr / static_cast<double>(f.n - f.p));
    }
}

TEST_CASE("Hald leverages sum to the coefficient count", "[regression]") {
    const Dataset hald = builtin("hald");
    const RegressionFit f = fit(design_matrix(hald), hald.y);
    const double trace_h = std::accumulate(f.leverage.begin(), f.leverage.end(), 0.0);
    CHECK_THAT(trace_h, Catch::Matchers::WithinAbs(5.0, 1e-8));
}

TEST_CASE("studentized residual basics", "[regression]") {
    const RegressionFit f = mean_fit_123();
    CHECK(studentized(f, 2) == 0.0);
    CHECK_THAT(studentized(f, 3), Catch::Matchers::WithinAbs(std::sqrt(1.5), 1e-12));
    CHECK_THAT(studentized(f, 3), Catch::Matchers::WithinAbs(1.2247, 5e-5));
    CHECK_THROWS_AS(studentized(f, 0), IndexOutOfRangeError);
    CHECK_THROWS_AS(studentized(f, 4), IndexOutOfRangeError);
}

TEST_CASE("unit leverage blocks studentization", "[regression]") {
    // third row is the only one with a nonzero second predictor -> h_33 = 1
    Matrix x(3, 2, Vector{1, 0, 1, 0, 1, 1});
    const RegressionFit f = fit(x, Vector{1.0, 2.0, 5.0});
    CHECK_THAT(f.leverage[2], Catch::Matchers::WithinAbs(1.0, 1e-12));
    CHECK_THROWS_AS(studentized(f, 3), LeverageOneError);
}

TEST_CASE("studentized squared times its denominator recovers the residual",
          "[regression][property]") {
    for (std::uint64_t seed = 1000; seed < 1200; ++seed) {
        const auto inst = testsupport::random_instance(seed);
        RegressionFit f;
        try {
            f = fit(inst.x, inst.y);
        } catch (const DegenerateResidualError&) {
            continue;
        }
        for (std::size_t i = 1; i <= f.n; ++i) {
            const double t = studentized(f, i);
            const double lhs = t * t * f.sigma2_hat * (1.0 - f.leverage[i - 1]);
            const double e = f.residuals[i - 1];
            CHECK(std::fabs(lhs - e * e) <= 1e-10 * std::max({1.0, lhs, e * e}));
        }
    }
}

TEST_CASE("fit is invariant under observation permutation", "[regression][property]") {
    for (std::uint64_t seed = 1300; seed < 1320; ++seed) {
        const auto inst = testsupport::random_instance(seed);
        const std::size_t n = inst.x.rows();
        std::vector<std::size_t> perm(n);
        std::iota(perm.begin(), perm.end(), std::size_t{0});
        Rng rng(seed + 99);
        for (std::size_t i = n; i-- > 1;) std::swap(perm[i], perm[rng.uniform_int(0, i)]);

        Matrix xp(n, inst.x.cols());
        Vector yp(n);
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < inst.x.cols(); ++j) xp(i, j) = inst.x(perm[i], j);
            yp[i] = inst.y[perm[i]];
        }
        RegressionFit f, fp;
        try {
            f = fit(inst.x, inst.y);
            fp = fit(xp, yp);
        } catch (const DegenerateResidualError&) {
            continue;
        }
        CHECK(close_rel(f.beta_hat, fp.beta_hat, 1e-8));
        CHECK(close_rel(f.sigma2_hat, fp.sigma2_hat, 1e-8));
        for (std::size_t i = 0; i < n; ++i) {
            CHECK(close_rel(f.residuals[perm[i]], fp.residuals[i], 1e-8));
            CHECK(std::fabs(f.leverage[perm[i]] - fp.leverage[i]) <= 1e-8);
        }
    }
}

TEST_CASE("studentized squared matches the quadratic-form route on Hald", "[regression]") {
    const Dataset hald = builtin("hald");
    const RegressionFit f = fit(design_matrix(hald), hald.y);
    const std::size_t i = 8;

    const Vector db = delta_beta(f, i);
    const VPseudoinverse vp = v_pseudoinverse(f, i);
    REQUIRE_FALSE(vp.degenerate);
    // [cov(delta beta)]^+ = ((1-h)/sigma^2) V^+
    const double h = f.leverage[i - 1];
    const Matrix cov_pinv = ((1.0 - h) / f.sigma2_hat) * vp.value;
    const double quad = dot(db, cov_pinv * db);

    const double t = studentized(f, i);
    CHECK(close_rel(t * t, quad, 1e-12));
    CHECK(close_rel(t * t, normalized_distance(f, i), 1e-12));
}
