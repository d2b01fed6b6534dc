#pragma once

// Adaptive Gauss-Kronrod (G7,K15) quadrature. Semi-infinite integrals go
// through the rational substitution x = u/(1-u).

#include <cmath>
#include <functional>
#include <stdexcept>

namespace ipv {

namespace detail {

// Kronrod 15-point nodes/weights on [-1,1] (positive half; node 0 included)
inline constexpr double kGK15Nodes[8] = {
    0.991455371120813, 0.949107912342759, 0.864864423359769, 0.741531185599394,
    0.586087235467691, 0.405845151377397, 0.207784955007898, 0.000000000000000};
inline constexpr double kGK15WK[8] = {
    0.022935322010529, 0.063092092629979, 0.104790010322250, 0.140653259715525,
    0.169004726639267, 0.190350578064785, 0.204432940075298, 0.209482141084728};
// Gauss 7-point weights matching nodes 1,3,5,7 above
inline constexpr double kGK15WG[4] = {
    0.129484966168870, 0.279705391489277, 0.381830050505119, 0.417959183673469};

template <class F>
inline void gk15(const F& f, double a, double b, double& result, double& err) {
    const double half = 0.5 * (b - a);
    const double mid = 0.5 * (a + b);
    double fk = 0.0, fg = 0.0;
    for (int i = 0; i < 8; ++i) {
        const double dx = half * kGK15Nodes[i];
        double v = (i == 7) ? f(mid) : f(mid - dx) + f(mid + dx);
        fk += kGK15WK[i] * v;
        if (i % 2 == 1) fg += kGK15WG[i / 2] * v;
    }
    result = fk * half;
    err = std::fabs((fk - fg) * half);
}

template <class F>
inline double adapt(const F& f, double a, double b, double tol, int depth) {
    double r, e;
    gk15(f, a, b, r, e);
    if (e <= tol || depth >= 52) return r;
    const double m = 0.5 * (a + b);
    return adapt(f, a, m, 0.5 * tol, depth + 1) + adapt(f, m, b, 0.5 * tol, depth + 1);
}

}  // namespace detail

template <class F>
inline double integrate(const F& f, double a, double b, double rel_tol = 1e-11,
                        double abs_tol = 1e-300) {
    if (!(b > a)) {
        if (b == a) return 0.0;
        throw std::invalid_argument("integrate: b < a");
    }
    double r, e;
    detail::gk15(f, a, b, r, e);
    const double tol = std::max(abs_tol, std::fabs(r) * rel_tol);
    if (e <= tol) return r;
    return detail::adapt(f, a, b, tol, 0);
}

// integral over [a, infinity); f must decay at infinity
template <class F>
inline double integrate_to_inf(const F& f, double a, double rel_tol = 1e-11) {
    auto g = [&](double u) {
        const double w = 1.0 - u;
        const double x = a + u / w;
        return f(x) / (w * w);
    };
    return integrate(g, 0.0, 1.0 - 1e-14, rel_tol);
}

}  // namespace ipv
