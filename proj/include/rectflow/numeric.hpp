#pragma once

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <string>

namespace rectflow {

/// Formats a double with at most 12 significant digits, preferring the
/// shortest representation that parses back to the same bits. All reports
/// and emitted documents go through this so output is reproducible.
inline std::string format_number(double x) {
    if (x == 0.0) return "0";  // avoid "-0"
    char buf[64];
    for (int prec = 1; prec <= 12; ++prec) {
        std::snprintf(buf, sizeof(buf), "%.*g", prec, x);
        if (std::strtod(buf, nullptr) == x) return buf;
    }
    std::snprintf(buf, sizeof(buf), "%.12g", x);
    return buf;
}

inline std::string format_number(double x, int max_digits) {
    if (x == 0.0) return "0";
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.*g", max_digits, x);
    return buf;
}

/// x reduced into [-period/2, period/2).
inline double wrap_symmetric(double x, double period) {
    double r = std::fmod(x, period);
    if (r < -period / 2) r += period;
    if (r >= period / 2) r -= period;
    return r;
}

/// x reduced into [0, period).
inline double wrap_positive(double x, double period) {
    double r = std::fmod(x, period);
    if (r < 0) r += period;
    if (r >= period) r -= period;  // fmod can return period for tiny negatives
    return r;
}

}  // namespace rectflow
