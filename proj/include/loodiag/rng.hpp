#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace loodiag {

/// Seeded random generator for reproducible Monte Carlo runs.
///
/// Engine: std::mt19937_64 (Mersenne Twister, 64-bit). The engine's output
/// sequence is fully specified by the C++ standard, so a given seed produces
/// the same stream on every conforming implementation.
///
/// Uniforms take the top 53 bits of one engine output: (x >> 11) * 2^-53,
/// giving doubles in [0, 1). Standard normal variates use the Marsaglia
/// polar method (rejection on the unit disk, both antithetic values kept),
/// never std::normal_distribution, whose algorithm is implementation-defined.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    /// Uniform in [0, 1).
    double uniform() {
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

    /// Uniform in [-1, 1).
    double uniform_symmetric() { return 2.0 * uniform() - 1.0; }

    /// Standard normal via Marsaglia polar.
    double normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u, v, s;
        do {
            u = uniform_symmetric();
            v = uniform_symmetric();
            s = u * u + v * v;
        } while (s >= 1.0 || s == 0.0);
        const double f = std::sqrt(-2.0 * std::log(s) / s);
        spare_ = v * f;
        has_spare_ = true;
        return u * f;
    }

    /// Integer in [lo, hi] by scaling one uniform; hi must be >= lo.
    std::uint64_t uniform_int(std::uint64_t lo, std::uint64_t hi) {
        return lo + static_cast<std::uint64_t>(uniform() * static_cast<double>(hi - lo + 1));
    }

private:
    std::mt19937_64 engine_;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace loodiag
