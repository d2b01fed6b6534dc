#pragma once

// Models of hyperbolic space: Poincare ball B_d and upper half-space U_d,
// their metrics, the Poisson kernel, the generalized Cayley transform,
// stereographic projection of the ideal boundary, ball Mobius isometries,
// and the volume growth function.
//
// Conventions: the ball origin maps to (0,...,0,1) in the half-space; the
// boundary sphere is projected stereographically from the north pole e_d,
// which is the point the Cayley transform sends to infinity.

#include <cmath>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "ipv/quadrature.hpp"
#include "ipv/rng.hpp"
#include "ipv/specfun.hpp"

namespace ipv::hyp {

using Vec = std::vector<double>;

inline void check_dim(int d) {
    if (d < 2) throw std::domain_error("dimension must be >= 2");
}

struct DimConstants {
    double c_d;      // 2^{2-d} pi^{d/2} / Gamma(d/2)
    double omega_d;  // surface area of the unit sphere S_{d-1}, = 2^{d-1} c_d
    double c_bold;   // 2(d-1)/c_d
};

inline double sphere_surface(int n) {
    // surface area of S_{n-1} in R^n
    return 2.0 * std::pow(kPi, 0.5 * n) / std::tgamma(0.5 * n);
}

inline DimConstants dim_constants(int d) {
    check_dim(d);
    const double c = std::pow(2.0, 2 - d) * std::pow(kPi, 0.5 * d) / std::tgamma(0.5 * d);
    return {c, std::pow(2.0, d - 1) * c, 2.0 * (d - 1) / c};
}

// ---- basic vector helpers ----

inline double dot(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

inline double norm2(std::span<const double> a) { return dot(a, a); }
inline double norm(std::span<const double> a) { return std::sqrt(norm2(a)); }

inline double dist2(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double diff = a[i] - b[i];
        s += diff * diff;
    }
    return s;
}

inline void check_ball(std::span<const double> z) {
    if (norm2(z) >= 1.0) throw std::domain_error("point must lie in the open unit ball");
}

// ---- Poisson kernel: density of harmonic measure seen from z ----
// K(z, theta) = ((1 - |z|^2) / |z - theta|^2)^{d-1}

inline double poisson_kernel(std::span<const double> z, std::span<const double> theta, int d) {
    check_dim(d);
    check_ball(z);
    const double num = 1.0 - norm2(z);
    const double den = dist2(z, theta);
    return std::pow(num / den, d - 1);
}

// sup over unit theta of K(z, theta), attained as theta -> z/|z|
inline double poisson_kernel_sup(std::span<const double> z, int d) {
    const double r = norm(z);
    return std::pow((1.0 + r) / (1.0 - r), d - 1);
}

// ---- metrics ----

inline double ball_distance(std::span<const double> x, std::span<const double> y) {
    check_ball(x);
    check_ball(y);
    const double q = dist2(x, y) / ((1.0 - norm2(x)) * (1.0 - norm2(y)));
    return 2.0 * std::asinh(std::sqrt(q));
}

inline double halfspace_distance(std::span<const double> x, std::span<const double> y) {
    const double hx = x.back(), hy = y.back();
    if (hx <= 0.0 || hy <= 0.0) throw std::domain_error("half-space height must be positive");
    return 2.0 * std::asinh(std::sqrt(dist2(x, y)) / (2.0 * std::sqrt(hx * hy)));
}

// ---- generalized Cayley transform B_d -> U_d (origin -> (0,...,0,1)) ----

inline Vec cayley(std::span<const double> p) {
    check_ball(p);
    const std::size_t d = p.size();
    double den = 0.0;
    for (std::size_t i = 0; i + 1 < d; ++i) den += p[i] * p[i];
    den += (p[d - 1] - 1.0) * (p[d - 1] - 1.0);
    Vec out(d);
    for (std::size_t i = 0; i + 1 < d; ++i) out[i] = 2.0 * p[i] / den;
    out[d - 1] = (1.0 - norm2(p)) / den;
    return out;
}

inline Vec cayley_inverse(std::span<const double> q) {
    const std::size_t d = q.size();
    if (q[d - 1] <= 0.0) throw std::domain_error("half-space height must be positive");
    double den = 0.0;
    for (std::size_t i = 0; i + 1 < d; ++i) den += q[i] * q[i];
    den += (q[d - 1] + 1.0) * (q[d - 1] + 1.0);
    Vec out(d);
    for (std::size_t i = 0; i + 1 < d; ++i) out[i] = 2.0 * q[i] / den;
    out[d - 1] = (norm2(q) - 1.0) / den;
    return out;
}

// ---- stereographic projection of S_{d-1} from the north pole e_d ----
// Matches the boundary extension of the Cayley transform. The north pole
// maps to the point-at-infinity sentinel (all coordinates +inf).

inline bool is_infinity(std::span<const double> x) {
    return !x.empty() && std::isinf(x[0]);
}

inline Vec stereographic(std::span<const double> theta) {
    const std::size_t d = theta.size();
    const double den = 1.0 - theta[d - 1];
    if (den <= 0.0)
        return Vec(d - 1, std::numeric_limits<double>::infinity());
    Vec out(d - 1);
    for (std::size_t i = 0; i + 1 < d; ++i) out[i] = theta[i] / den;
    return out;
}

inline Vec stereographic_inverse(std::span<const double> x) {
    const std::size_t m = x.size();
    const double q = norm2(x);
    Vec out(m + 1);
    const double den = 1.0 + q;
    for (std::size_t i = 0; i < m; ++i) out[i] = 2.0 * x[i] / den;
    out[m] = (q - 1.0) / den;
    return out;
}

// density of the pushforward of Unif(S_{d-1}) under stereographic projection
inline double stereographic_density(std::span<const double> x, int d) {
    return std::pow(1.0 + norm2(x), 1 - d) / dim_constants(d).c_d;
}

// ---- ball Mobius isometries ----
// An isometry is stored as (rotation, translation parameter p) acting as
// z -> R * T_p(z), where T_p is the Mobius translation with T_p(p) = 0.

// T_p(x) = ((1-|p|^2)(x-p) - |x-p|^2 p) / (1 - 2<x,p> + |x|^2 |p|^2);
// also valid for |x| = 1 (boundary extension).
inline Vec mobius_translate(std::span<const double> p, std::span<const double> x) {
    const std::size_t d = p.size();
    const double p2 = norm2(p);
    const double x2 = norm2(x);
    const double xp = dot(x, p);
    const double den = 1.0 - 2.0 * xp + x2 * p2;
    const double a = (1.0 - p2) / den;
    const double b = dist2(x, p) / den;
    Vec out(d);
    for (std::size_t i = 0; i < d; ++i) out[i] = a * (x[i] - p[i]) - b * p[i];
    return out;
}

struct Isometry {
    std::vector<double> rotation;  // d x d, row-major, orthogonal
    Vec translation;               // |p| < 1; action is rotation after translation
    int d = 0;
};

inline Vec rotate(const Isometry& iso, std::span<const double> x) {
    Vec out(iso.d, 0.0);
    for (int i = 0; i < iso.d; ++i)
        for (int j = 0; j < iso.d; ++j) out[i] += iso.rotation[i * iso.d + j] * x[j];
    return out;
}

inline Vec rotate_transpose(const Isometry& iso, std::span<const double> x) {
    Vec out(iso.d, 0.0);
    for (int i = 0; i < iso.d; ++i)
        for (int j = 0; j < iso.d; ++j) out[i] += iso.rotation[j * iso.d + i] * x[j];
    return out;
}

inline Isometry identity_isometry(int d) {
    check_dim(d);
    Isometry iso;
    iso.d = d;
    iso.rotation.assign(static_cast<std::size_t>(d) * d, 0.0);
    for (int i = 0; i < d; ++i) iso.rotation[i * d + i] = 1.0;
    iso.translation.assign(d, 0.0);
    return iso;
}

inline Isometry mobius_to_origin(std::span<const double> p) {
    check_ball(p);
    Isometry iso = identity_isometry(static_cast<int>(p.size()));
    iso.translation.assign(p.begin(), p.end());
    return iso;
}

inline Vec apply(const Isometry& iso, std::span<const double> z) {
    check_ball(z);
    return rotate(iso, mobius_translate(iso.translation, z));
}

inline Vec apply_boundary(const Isometry& iso, std::span<const double> theta) {
    Vec img = rotate(iso, mobius_translate(iso.translation, theta));
    // renormalize: the formula preserves the sphere up to rounding
    const double n = norm(img);
    for (auto& v : img) v /= n;
    return img;
}

// iso^{-1}(0), the point an isometry's inverse sends to the origin; equals
// the translation parameter because rotation fixes the origin.
inline const Vec& base_point(const Isometry& iso) { return iso.translation; }

namespace detail {

// Recover the canonical (rotation, translation) form of a ball Mobius map
// given as a callable. The map's rotation part is linear and is read off
// from images of boundary basis vectors.
template <class MapFn>
inline Isometry canonical_form(int d, std::span<const double> pre_origin, const MapFn& map) {
    Isometry iso = identity_isometry(d);
    iso.translation.assign(pre_origin.begin(), pre_origin.end());
    Vec neg(pre_origin.begin(), pre_origin.end());
    for (auto& v : neg) v = -v;
    for (int j = 0; j < d; ++j) {
        Vec e(d, 0.0);
        e[j] = 1.0;
        Vec pre = mobius_translate(neg, e);  // T_{p'}^{-1}(e_j), a boundary point
        Vec img = map(pre);
        for (int i = 0; i < d; ++i) iso.rotation[i * d + j] = img[i];
    }
    return iso;
}

}  // namespace detail

inline Isometry compose(const Isometry& a, const Isometry& b) {
    // (a o b)(x); translation parameter is (a o b)^{-1}(0)
    if (a.d != b.d) throw std::invalid_argument("compose: dimension mismatch");
    Vec nb(b.translation);
    for (auto& v : nb) v = -v;
    Vec p = mobius_translate(nb, rotate_transpose(b, a.translation));
    auto map = [&](std::span<const double> x) {
        return rotate(a, mobius_translate(a.translation, rotate(b, mobius_translate(b.translation, x))));
    };
    return detail::canonical_form(a.d, p, map);
}

inline Isometry inverse(const Isometry& iso) {
    Vec p = rotate(iso, iso.translation);
    for (auto& v : p) v = -v;  // iso(0) = -R p; inverse sends it back to 0
    Vec np(iso.translation);
    for (auto& v : np) v = -v;
    auto map = [&](std::span<const double> x) {
        return mobius_translate(np, rotate_transpose(iso, x));
    };
    return detail::canonical_form(iso.d, p, map);
}

// Haar-distributed rotation: QR of a Gaussian matrix with sign-fixed diagonal.
inline Isometry random_rotation(int d, RngStream& rng) {
    check_dim(d);
    Isometry iso = identity_isometry(d);
    std::vector<Vec> cols(d, Vec(d));
    for (auto& c : cols)
        for (auto& v : c) v = rng.normal();
    for (int j = 0; j < d; ++j) {
        for (int k = 0; k < j; ++k) {
            const double proj = dot(cols[j], cols[k]);
            for (int i = 0; i < d; ++i) cols[j][i] -= proj * cols[k][i];
        }
        double n = norm(cols[j]);
        if (n < 1e-12) { cols[j][j] += 1.0; n = norm(cols[j]); }
        for (auto& v : cols[j]) v /= n;
    }
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) iso.rotation[i * d + j] = cols[j][i];
    return iso;
}

inline Isometry random_isometry(int d, RngStream& rng, double max_radius = 0.9) {
    Isometry rot = random_rotation(d, rng);
    Vec p = rng.sphere_dir(d);
    const double r = max_radius * std::pow(rng.u01(), 1.0 / d);
    for (auto& v : p) v *= r;
    Isometry tr = mobius_to_origin(p);
    return compose(rot, tr);
}

// ---- volume growth f_d(r) = Omega_d int_0^r sinh^{d-1} ----

inline double volume_growth(int d, double r) {
    check_dim(d);
    if (r < 0.0) throw std::domain_error("volume_growth: r must be >= 0");
    if (r == 0.0) return 0.0;
    const double om = dim_constants(d).omega_d;
    if (d == 2) return om * (std::cosh(r) - 1.0);
    if (d == 3) return om * 0.5 * (std::sinh(r) * std::cosh(r) - r);
    return om * integrate([=](double u) { return std::pow(std::sinh(u), d - 1); }, 0.0, r, 1e-11);
}

inline double volume_growth_inverse(int d, double v) {
    check_dim(d);
    if (v < 0.0) throw std::domain_error("volume_growth_inverse: v must be >= 0");
    if (v == 0.0) return 0.0;
    // bracket, then bisection with Newton polish
    double hi = 1.0;
    while (volume_growth(d, hi) < v) hi *= 2.0;
    double lo = 0.0;
    for (int it = 0; it < 80; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (volume_growth(d, mid) < v) lo = mid; else hi = mid;
        if (hi - lo < 1e-13 * (1.0 + hi)) break;
    }
    double r = 0.5 * (lo + hi);
    const double om = dim_constants(d).omega_d;
    for (int it = 0; it < 80; ++it) {
        const double fr = volume_growth(d, r) - v;
        const double dr = om * std::pow(std::sinh(r), d - 1);
        if (dr == 0.0) break;
        const double step = fr / dr;
        r -= step;
        if (r < lo || r > hi) { r = 0.5 * (lo + hi); break; }
        if (std::fabs(step) < 1e-14 * (1.0 + r)) break;
    }
    return r;
}

}  // namespace ipv::hyp
