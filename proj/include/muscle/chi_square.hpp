#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>

namespace muscle {

namespace detail {

// Regularized lower incomplete gamma P(a, x) by its power series; converges
// quickly for x < a + 1.
inline double gamma_p_series(double a, double x) {
    double term = 1.0 / a;
    double sum = term;
    double ap = a;
    for (int i = 0; i < 500; ++i) {
        ap += 1.0;
        term *= x / ap;
        sum += term;
        if (std::abs(term) < std::abs(sum) * 1e-16) break;
    }
    return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// Regularized upper incomplete gamma Q(a, x) by Lentz's continued fraction;
// converges quickly for x >= a + 1.
inline double gamma_q_contfrac(double a, double x) {
    const double tiny = 1e-300;
    double b = x + 1.0 - a;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i <= 500; ++i) {
        const double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double delta = d * c;
        h *= delta;
        if (std::abs(delta - 1.0) < 1e-16) break;
    }
    return h * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

}  // namespace detail

// P(chi2(dof) > x).
inline double chi2_upper_tail(double x, int dof) {
    if (dof < 1) throw std::invalid_argument("chi2_upper_tail: dof must be >= 1");
    if (x < 0.0) throw std::invalid_argument("chi2_upper_tail: x must be nonnegative");
    if (x == 0.0) return 1.0;
    const double a = 0.5 * static_cast<double>(dof);
    const double t = 0.5 * x;
    if (t < a + 1.0) return 1.0 - detail::gamma_p_series(a, t);
    return detail::gamma_q_contfrac(a, t);
}

// Inverse of the upper-tail function: the x with P(chi2(dof) > x) = p,
// located by bracketed bisection.
inline double chi2_quantile(double p, int dof) {
    if (dof < 1) throw std::invalid_argument("chi2_quantile: dof must be >= 1");
    if (!(p > 0.0 && p < 1.0)) throw std::invalid_argument("chi2_quantile: p must lie in (0,1)");

    double lo = 0.0;
    double hi = static_cast<double>(dof);
    while (chi2_upper_tail(hi, dof) > p) {
        hi *= 2.0;
        if (hi > 1e9) return hi;
    }
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (chi2_upper_tail(mid, dof) > p)
            lo = mid;
        else
            hi = mid;
        if (hi - lo < 1e-12 * (1.0 + hi)) break;
    }
    return 0.5 * (lo + hi);
}

}  // namespace muscle
