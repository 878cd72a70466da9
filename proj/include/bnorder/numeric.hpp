#pragma once

#include <cmath>
#include <limits>
#include <span>
#include <utility>

namespace bnorder {

/// Reentrant ln Γ(x) for x > 0.
inline double log_gamma(double x) {
#if defined(__GLIBC__)
    int sign = 0;
    return ::lgamma_r(x, &sign);
#else
    return std::lgamma(x);
#endif
}

/// ln C(n, k)
inline double log_binomial(int n, int k) {
    return log_gamma(n + 1.0) - log_gamma(k + 1.0) - log_gamma(n - k + 1.0);
}

/// log Σ exp(values), max-subtracted, accumulated left to right.
/// Returns -inf for an empty range.
inline double log_sum_exp(std::span<const double> values) {
    double hi = -std::numeric_limits<double>::infinity();
    for (double v : values) hi = v > hi ? v : hi;
    if (!std::isfinite(hi)) return hi;
    double acc = 0.0;
    for (double v : values) acc += std::exp(v - hi);
    return hi + std::log(acc);
}

/// log(exp(a) + exp(b))
inline double log_add(double a, double b) {
    if (a < b) std::swap(a, b);
    if (b == -std::numeric_limits<double>::infinity()) return a;
    return a + std::log1p(std::exp(b - a));
}

}  // namespace bnorder
