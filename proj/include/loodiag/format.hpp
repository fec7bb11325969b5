#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <string>

namespace loodiag {

/// Fixed-point rendering with round-half-even at `precision` decimals
/// (1..12). Built from integer arithmetic so identical inputs give identical
/// bytes everywhere; negative zero collapses to zero.
inline std::string format_fixed(double x, int precision) {
    if (precision < 1) precision = 1;
    if (precision > 12) precision = 12;
    if (!std::isfinite(x)) return x != x ? "nan" : (x > 0 ? "inf" : "-inf");

    std::int64_t pow10 = 1;
    for (int i = 0; i < precision; ++i) pow10 *= 10;

    const double scaled = x * static_cast<double>(pow10);
    if (std::fabs(scaled) >= 9.0e18) {  // out of integer range; defer to printf
        char buf[64];
        std::snprintf(buf, sizeof buf, "%.*f", precision, x);
        return buf;
    }
    // llrint honors the default round-to-nearest, ties-to-even mode.
    std::int64_t k = std::llrint(scaled);
    bool neg = k < 0;
    if (neg) k = -k;
    if (k == 0) neg = false;

    std::string digits = std::to_string(k);
    if (digits.size() <= static_cast<std::size_t>(precision)) {
        digits.insert(0, static_cast<std::size_t>(precision) + 1 - digits.size(), '0');
    }
    digits.insert(digits.size() - static_cast<std::size_t>(precision), 1, '.');
    return neg ? "-" + digits : digits;
}

}  // namespace loodiag
