#pragma once

#include <cmath>
#include <cstdlib>
#include <string>

#include "gpelab/errors.hpp"

namespace gpelab {

/// ln Gamma(x) for x > 0.  Relative error <= 1e-13 away from the zeros of
/// lgamma; the libm implementation is a minimax one and delivers a few ulp.
inline double log_gamma(double x) {
    if (!(x > 0.0)) throw DomainError("log_gamma: requires x > 0");
    return std::lgamma(x);
}

/// Surface measure of the unit sphere in R^d: 2 pi^{d/2} / Gamma(d/2).
inline double sphere_measure(int d) {
    if (d < 2) throw DomainError("sphere_measure: requires d >= 2");
    const double half_d = 0.5 * static_cast<double>(d);
    return 2.0 * std::exp(half_d * std::log(M_PI) - log_gamma(half_d));
}

/// Euler Beta function B(p, q) for p, q > 0.
inline double beta_function(double p, double q) {
    if (!(p > 0.0) || !(q > 0.0)) throw DomainError("beta_function: requires p, q > 0");
    return std::exp(log_gamma(p) + log_gamma(q) - log_gamma(p + q));
}

/// Closed form of int_0^inf r^a (1+r^2)^{-b} dr = (1/2) B((a+1)/2, b-(a+1)/2).
/// Throws DivergenceError when the integral is infinite, which happens exactly
/// where a bubble norm blows up for the given dimension.
inline double power_integral(double a, double b) {
    const double p = 0.5 * (a + 1.0);
    const double q = b - p;
    if (!(p > 0.0))
        throw DivergenceError("power_integral: divergent at r = 0 (need a > -1)");
    if (!(q > 0.0))
        throw DivergenceError("power_integral: divergent at r = inf (need b > (a+1)/2)");
    return 0.5 * beta_function(p, q);
}

/// Kummer's confluent hypergeometric series M(a; b; x) = sum (a)_n/(b)_n x^n/n!.
/// Terminates exactly when -a is a nonnegative integer; otherwise the series is
/// truncated once five consecutive terms fall below 1e-16 of the partial sum.
inline double kummer_m(double a, double b, double x) {
    if (b <= 0.0 && b == std::floor(b))
        throw DomainError("kummer_m: b must not be zero or a negative integer");
    const bool terminating = (a <= 0.0 && a == std::floor(a));
    const long n_terms = terminating ? static_cast<long>(-a) : -1;

    double sum = 1.0;
    double term = 1.0;
    int quiet = 0;
    const long max_iter = 100000;
    for (long n = 0; n < max_iter; ++n) {
        if (terminating && n == n_terms) return sum;
        term *= (a + static_cast<double>(n)) / (b + static_cast<double>(n)) * x /
                static_cast<double>(n + 1);
        sum += term;
        if (!terminating) {
            if (std::abs(term) < 1e-16 * std::abs(sum))
                ++quiet;
            else
                quiet = 0;
            if (quiet >= 5) return sum;
        }
    }
    if (terminating) return sum;
    throw Error("kummer_m: series did not settle within " + std::to_string(max_iter) +
                " terms (x too large?)");
}

}  // namespace gpelab
