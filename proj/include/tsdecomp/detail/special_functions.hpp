#pragma once

// Regularized incomplete gamma and beta functions, and the chi-square / F
// distribution tails built from them.

#include <cmath>
#include <limits>

#include "tsdecomp/error.hpp"

namespace tsdecomp::detail {

namespace gamma_impl {

inline double series(double a, double x) {
    double sum = 1.0 / a;
    double term = sum;
    for (int n = 1; n < 10000; ++n) {
        term *= x / (a + n);
        sum += term;
        if (std::abs(term) < std::abs(sum) * 1e-17) break;
    }
    return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// Continued fraction for Q(a, x), modified Lentz.
inline double continued_fraction(double a, double x) {
    constexpr double tiny = 1e-300;
    double b = x + 1.0 - a;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i < 10000; ++i) {
        const double an = -i * (i - a);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double delta = d * c;
        h *= delta;
        if (std::abs(delta - 1.0) < 1e-17) break;
    }
    return std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
}

} // namespace gamma_impl

/// P(a, x) = gamma(a, x) / Gamma(a).
inline double gamma_p(double a, double x) {
    if (!(a > 0.0)) throw_parameter("gamma_p: a must be positive");
    if (x <= 0.0) return 0.0;
    if (std::isinf(x)) return 1.0;
    if (x < a + 1.0) return gamma_impl::series(a, x);
    return 1.0 - gamma_impl::continued_fraction(a, x);
}

/// Q(a, x) = 1 - P(a, x), computed without cancellation in the upper tail.
inline double gamma_q(double a, double x) {
    if (!(a > 0.0)) throw_parameter("gamma_q: a must be positive");
    if (x <= 0.0) return 1.0;
    if (std::isinf(x)) return 0.0;
    if (x < a + 1.0) return 1.0 - gamma_impl::series(a, x);
    return gamma_impl::continued_fraction(a, x);
}

namespace beta_impl {

inline double continued_fraction(double a, double b, double x) {
    constexpr double tiny = 1e-300;
    const double qab = a + b;
    const double qap = a + 1.0;
    const double qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::abs(d) < tiny) d = tiny;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m < 10000; ++m) {
        const int m2 = 2 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < tiny) d = tiny;
        c = 1.0 + aa / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < tiny) d = tiny;
        c = 1.0 + aa / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double delta = d * c;
        h *= delta;
        if (std::abs(delta - 1.0) < 1e-16) break;
    }
    return h;
}

} // namespace beta_impl

/// Regularized incomplete beta I_x(a, b).
inline double beta_inc(double a, double b, double x) {
    if (!(a > 0.0 && b > 0.0)) throw_parameter("beta_inc: shape parameters must be positive");
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    const double log_front =
        std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) + a * std::log(x) + b * std::log1p(-x);
    const double front = std::exp(log_front);
    if (x < (a + 1.0) / (a + b + 2.0)) return front * beta_impl::continued_fraction(a, b, x) / a;
    return 1.0 - front * beta_impl::continued_fraction(b, a, 1.0 - x) / b;
}

inline double chi2_cdf(double x, double dof) { return gamma_p(0.5 * dof, 0.5 * x); }
inline double chi2_sf(double x, double dof) { return gamma_q(0.5 * dof, 0.5 * x); }

/// Upper tail P(F > f) of the F(d1, d2) distribution.
inline double f_sf(double f, double d1, double d2) {
    if (!(f > 0.0)) return 1.0;
    return beta_inc(0.5 * d2, 0.5 * d1, d2 / (d2 + d1 * f));
}

} // namespace tsdecomp::detail
