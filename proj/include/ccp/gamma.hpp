#pragma once

#include <cmath>
#include <stdexcept>

namespace ccp {

namespace detail {

inline constexpr int kGammaMaxIter = 500;
inline constexpr double kGammaEps = 1e-16;

/// Series expansion of the regularized lower incomplete gamma P(a, x), x < a+1.
inline double gamma_p_series(double a, double x) {
    double ap = a;
    double term = 1.0 / a;
    double sum = term;
    for (int i = 0; i < kGammaMaxIter; ++i) {
        ap += 1.0;
        term *= x / ap;
        sum += term;
        if (std::abs(term) < std::abs(sum) * kGammaEps)
            return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
    }
    throw std::runtime_error("incomplete gamma series failed to converge");
}

/// Continued fraction (modified Lentz) for Q(a, x) = 1 - P(a, x), x >= a+1.
inline double gamma_q_contfrac(double a, double x) {
    const double tiny = 1e-300;
    double b = x + 1.0 - a;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i <= kGammaMaxIter; ++i) {
        const double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double delta = d * c;
        h *= delta;
        if (std::abs(delta - 1.0) < kGammaEps)
            return h * std::exp(-x + a * std::log(x) - std::lgamma(a));
    }
    throw std::runtime_error("incomplete gamma continued fraction failed to converge");
}

}  // namespace detail

/// Regularized lower incomplete gamma function P(a, x).
inline double gamma_p(double a, double x) {
    if (!(a > 0.0)) throw std::invalid_argument("gamma_p requires a > 0");
    if (x < 0.0) throw std::invalid_argument("gamma_p requires x >= 0");
    if (x == 0.0) return 0.0;
    if (x < a + 1.0) return detail::gamma_p_series(a, x);
    return 1.0 - detail::gamma_q_contfrac(a, x);
}

/// CDF of the chi-squared distribution with d degrees of freedom.
inline double chi_squared_cdf(double t, std::size_t d) {
    if (t <= 0.0) return 0.0;
    return gamma_p(static_cast<double>(d) / 2.0, t / 2.0);
}

/**
 * Inverse CDF of the chi-squared distribution, by safeguarded bisection on
 * the regularized incomplete gamma function to absolute tolerance 1e-12.
 */
inline double chi_squared_quantile(double q, std::size_t d) {
    if (!(q > 0.0 && q < 1.0))
        throw std::invalid_argument("chi_squared_quantile requires 0 < q < 1");
    const double dd = static_cast<double>(d);
    double hi = dd + 10.0 * std::sqrt(2.0 * dd) + 10.0;
    while (chi_squared_cdf(hi, d) < q) {
        hi *= 2.0;
        if (hi > 1e308) throw std::runtime_error("chi_squared_quantile bracket expansion failed");
    }
    double lo = 0.0;
    for (int i = 0; i < 400; ++i) {
        const double mid = 0.5 * (lo + hi);
        const double f = chi_squared_cdf(mid, d);
        if (std::abs(f - q) <= 1e-12) return mid;
        (f < q ? lo : hi) = mid;
        if (hi - lo <= 1e-14 * (1.0 + hi)) break;
    }
    return 0.5 * (lo + hi);
}

}  // namespace ccp
