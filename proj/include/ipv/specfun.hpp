#pragma once

// Special functions needed by the analytic formulas and the test statistics:
// regularized incomplete gamma/beta, the Kolmogorov distribution, and the
// Gauss hypergeometric 2F1 on [0,1).

#include <cmath>
#include <limits>
#include <stdexcept>

namespace ipv {

inline constexpr double kPi = 3.14159265358979323846;

// ---- regularized incomplete gamma P(a,x), Q(a,x) ----

namespace detail {

inline double gamma_series(double a, double x) {
    double ap = a;
    double sum = 1.0 / a;
    double del = sum;
    for (int n = 0; n < 500; ++n) {
        ap += 1.0;
        del *= x / ap;
        sum += del;
        if (std::fabs(del) < std::fabs(sum) * 1e-16)
            return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
    }
    throw std::runtime_error("gamma_series: no convergence");
}

inline double gamma_cf(double a, double x) {
    const double tiny = 1e-300;
    double b = x + 1.0 - a;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i <= 500; ++i) {
        double an = -i * (i - a);
        b += 2.0;
        d = an * d + b;
        if (std::fabs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::fabs(c) < tiny) c = tiny;
        d = 1.0 / d;
        double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < 1e-16)
            return std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
    }
    throw std::runtime_error("gamma_cf: no convergence");
}

}  // namespace detail

inline double gammp(double a, double x) {
    if (x < 0.0 || a <= 0.0) throw std::domain_error("gammp: bad arguments");
    if (x == 0.0) return 0.0;
    if (x < a + 1.0) return detail::gamma_series(a, x);
    return 1.0 - detail::gamma_cf(a, x);
}

inline double gammq(double a, double x) {
    if (x < 0.0 || a <= 0.0) throw std::domain_error("gammq: bad arguments");
    if (x == 0.0) return 1.0;
    if (x < a + 1.0) return 1.0 - detail::gamma_series(a, x);
    return detail::gamma_cf(a, x);
}

// ---- regularized incomplete beta I_x(a,b) ----

namespace detail {

inline double betacf(double a, double b, double x) {
    const double tiny = 1e-300;
    const double qab = a + b, qap = a + 1.0, qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::fabs(d) < tiny) d = tiny;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= 500; ++m) {
        const int m2 = 2 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < tiny) d = tiny;
        c = 1.0 + aa / c;
        if (std::fabs(c) < tiny) c = tiny;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < tiny) d = tiny;
        c = 1.0 + aa / c;
        if (std::fabs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < 1e-16) return h;
    }
    throw std::runtime_error("betacf: no convergence");
}

}  // namespace detail

inline double incbeta(double a, double b, double x) {
    if (a <= 0.0 || b <= 0.0) throw std::domain_error("incbeta: a,b must be positive");
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    const double lbeta = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b);
    const double front = std::exp(lbeta + a * std::log(x) + b * std::log1p(-x));
    if (x < (a + 1.0) / (a + b + 2.0))
        return front * detail::betacf(a, b, x) / a;
    return 1.0 - front * detail::betacf(b, a, 1.0 - x) / b;
}

// ---- Kolmogorov distribution (limit law of sqrt(n) D_n) ----

// Q(x) = P(K > x) = 2 sum_{k>=1} (-1)^{k-1} exp(-2 k^2 x^2)
inline double kolmogorov_sf(double x) {
    if (x <= 0.0) return 1.0;
    if (x < 1.18) {
        // dual theta series, accurate for small x
        const double t = kPi * kPi / (8.0 * x * x);
        double sum = 0.0;
        for (int k = 1; k <= 21; k += 2) sum += std::exp(-static_cast<double>(k) * k * t);
        double cdf = std::sqrt(2.0 * kPi) / x * sum;
        return 1.0 - cdf;
    }
    double sum = 0.0;
    double sign = 1.0;
    for (int k = 1; k <= 100; ++k) {
        const double term = std::exp(-2.0 * k * k * x * x);
        sum += sign * term;
        if (term < 1e-18) break;
        sign = -sign;
    }
    double q = 2.0 * sum;
    if (q < 0.0) q = 0.0;
    if (q > 1.0) q = 1.0;
    return q;
}

// ---- Gauss hypergeometric 2F1(a,b;c;x) on x in [0,1) ----

namespace detail {

inline double hyp2f1_series(double a, double b, double c, double x) {
    double term = 1.0, sum = 1.0;
    for (int n = 0; n < 2000000; ++n) {
        term *= (a + n) * (b + n) / ((c + n) * (n + 1.0)) * x;
        sum += term;
        if (std::fabs(term) <= std::fabs(sum) * 1e-17) return sum;
        if (term == 0.0) return sum;  // terminating case
    }
    throw std::runtime_error("hyp2f1: series did not converge");
}

}  // namespace detail

// When c-a-b < 0 the direct series converges too slowly near x = 1 (the
// function diverges there); the Euler transformation flips the sign of
// c-a-b, giving a series that converges on all of [0,1).
inline double gauss_2f1(double a, double b, double c, double x) {
    if (!(x >= 0.0 && x < 1.0)) throw std::domain_error("gauss_2f1: x must lie in [0,1)");
    if (c <= 0.0 && c == std::floor(c)) throw std::domain_error("gauss_2f1: c is a nonpositive integer");
    const double s = c - a - b;
    if (s < 0.0) return std::pow(1.0 - x, s) * detail::hyp2f1_series(c - a, c - b, c, x);
    return detail::hyp2f1_series(a, b, c, x);
}

}  // namespace ipv
