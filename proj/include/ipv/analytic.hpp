#pragma once

// Closed-form and quadrature evaluation of the distributional laws of the
// tessellation: the hole-probability integral I_d(r), height and angle laws
// of the cell boundary, vertex intensities and their dimensional constant
// nu_d, the isoperimetric constant, and the root-degree pmf on trees.

#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

#include "ipv/hyperbolic.hpp"
#include "ipv/quadrature.hpp"
#include "ipv/rng.hpp"
#include "ipv/specfun.hpp"

namespace ipv::analytic {

// ---- the hole integral ----
// 1 + I_d(r) = (1/c_d) int_{R^{d-1}} (sqrt(cosh^2 r + |x|^2) - sinh r)^{2-2d} dx.
// Radial reduction and the substitutions x = cosh(r) y, sqrt(1+t^2) = 1/sin(phi)
// turn it into a smooth integral over (0, pi/2):
//   1 + I_d(r) = cosh(r)^{1-d} * (Omega_{d-1}/c_d) *
//                int_0^{pi/2} (sin cos)^{d-2} (1 - tanh(r) sin)^{2-2d} dphi.
// r may be slightly negative here; that analytic extension backs the
// finite-difference check of the isoperimetric constant at r = 0.

namespace detail {

inline double one_plus_I(int d, double r) {
    hyp::check_dim(d);
    const double T = std::tanh(r);
    const auto f = [=](double p) {
        const double sc = std::sin(p) * std::cos(p);
        return std::pow(sc, d - 2) * std::pow(1.0 - T * std::sin(p), 2.0 - 2.0 * d);
    };
    const double g = integrate(f, 0.0, 0.5 * kPi, 1e-11);
    return std::pow(std::cosh(r), 1.0 - d) * hyp::sphere_surface(d - 1) /
           hyp::dim_constants(d).c_d * g;
}

}  // namespace detail

inline double I_d(int d, double r) {
    hyp::check_dim(d);
    if (r < 0.0) throw std::domain_error("I_d: r must be >= 0");
    if (r == 0.0) return 0.0;
    if (d == 2)
        return (4.0 * std::atan(std::exp(r)) * std::cosh(r) * std::cosh(r) +
                2.0 * std::sinh(r)) / kPi - 1.0;
    if (d == 3) return (2.0 + std::exp(2.0 * r)) * std::exp(2.0 * r) / 3.0 - 1.0;
    return detail::one_plus_I(d, r) - 1.0;
}

inline double I_d_quadrature(int d, double r) { return detail::one_plus_I(d, r) - 1.0; }

inline double isoperimetric_constant(int d) {
    hyp::check_dim(d);
    return std::exp((d - 1) * std::log(2.0) + 2.0 * std::lgamma(0.5 * d) -
                    std::lgamma(d - 0.5)) * (d - 1) / std::sqrt(kPi);
}

inline double isoperimetric_asymptote(int d) {
    return std::sqrt(2.0) * d - 9.0 / (4.0 * std::sqrt(2.0));
}

// hypergeometric route, used to cross-validate the quadrature:
// 1+I_d = cosh^{1-d} [ 2F1(d-1/2,(d-1)/2;1/2;tanh^2 r)
//                      + C_d tanh(r) 2F1(d/2,d;3/2;tanh^2 r) ]
// where C_d is the isoperimetric constant.
inline double one_plus_I_hypergeometric(int d, double r) {
    hyp::check_dim(d);
    const double x = std::tanh(r) * std::tanh(r);
    const double even = gauss_2f1(d - 0.5, 0.5 * (d - 1), 0.5, x);
    const double odd = gauss_2f1(0.5 * d, d, 1.5, x);
    return std::pow(std::cosh(r), 1.0 - d) *
           (even + isoperimetric_constant(d) * std::tanh(r) * odd);
}

// P(B_r(o) in the cell | R_1 = s) = exp(-s I_d(r)); averaged: 1/(1+I_d(r)).
inline double hole_prob(int d, double r, std::optional<double> s = std::nullopt) {
    const double I = I_d(d, r);
    if (s) {
        if (*s <= 0.0) throw std::domain_error("hole_prob: s must be positive");
        return std::exp(-*s * I);
    }
    return 1.0 / (1.0 + I);
}

// two-sided derivative of the averaged hole law, via the analytic extension
inline double hole_prob_derivative_at_zero(int d, double h = 1e-5) {
    const double up = 1.0 / detail::one_plus_I(d, h);
    const double dn = 1.0 / detail::one_plus_I(d, -h);
    return (up - dn) / (2.0 * h);
}

// ---- d=2 distance-to-boundary law ----

inline double hole_tail_2d(double r) {
    return kPi / (4.0 * std::atan(std::exp(r)) * std::cosh(r) * std::cosh(r) +
                  2.0 * std::sinh(r));
}

inline double hole_density_2d(double r) {
    if (r < 0.0) return 0.0;
    const double at = std::atan(std::exp(r));
    const double den = std::sinh(r) + 2.0 * at * std::cosh(r) * std::cosh(r);
    return kPi * std::cosh(r) * (2.0 * at * std::sinh(r) + 1.0) / (den * den);
}

inline double hole_mean_distance_2d() {
    // integral of the tail; beyond r = 40 the tail is below 2e-35
    return integrate([](double r) { return hole_tail_2d(r); }, 0.0, 40.0, 1e-12);
}

inline double hole_median_distance_2d() {
    double lo = 0.0, hi = 2.0;
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (hole_tail_2d(mid) > 0.5) lo = mid; else hi = mid;
    }
    return 0.5 * (lo + hi);
}

// ---- height and angle laws of the stationary boundary ----

inline double height_cdf(int d, double s, double h) {
    hyp::check_dim(d);
    if (s <= 0.0) throw std::domain_error("height_cdf: s must be positive");
    if (h <= 0.0) return 0.0;
    return std::exp(-s / std::pow(h, d - 1));
}

inline double height_cdf_avg(int d, double h) {
    hyp::check_dim(d);
    if (h <= 0.0) return 0.0;
    const double hp = std::pow(h, d - 1);
    return hp / (1.0 + hp);
}

inline double angle_density(int d, double theta) {
    hyp::check_dim(d);
    if (theta <= 0.0 || theta >= 0.5 * kPi) return 0.0;
    const double norm = std::exp(d * std::log(2.0) + std::lgamma(0.5 * d) -
                                 std::lgamma(0.5 * (d - 1))) / std::sqrt(kPi);
    return norm * std::pow(std::sin(theta), d) * std::pow(std::cos(theta), d - 2);
}

// sin^2(Theta) ~ Beta((d+1)/2, (d-1)/2)
inline double sin2_angle_cdf(int d, double b) {
    return incbeta(0.5 * (d + 1), 0.5 * (d - 1), b);
}

// ---- vertex intensity ----

// conditional on R_1 = s: (c_bold s)^d / d! * nu_d * exp(-s/z^{d-1}) / z^{d^2}
inline double vertex_intensity(int d, double s, double nu_d, double z) {
    hyp::check_dim(d);
    if (z <= 0.0) throw std::domain_error("vertex_intensity: z must be positive");
    const double cb = hyp::dim_constants(d).c_bold;
    double logv = d * std::log(cb * s) - std::lgamma(d + 1.0) + std::log(nu_d) -
                  s / std::pow(z, d - 1) - (static_cast<double>(d) * d) * std::log(z);
    return std::exp(logv);
}

// averaged over R_1 ~ Exp(1): c_bold^d nu_d / (z (1+z^{d-1})^{d+1})
inline double vertex_intensity_avg(int d, double nu_d, double z) {
    hyp::check_dim(d);
    if (z <= 0.0) throw std::domain_error("vertex_intensity: z must be positive");
    const double cb = hyp::dim_constants(d).c_bold;
    return std::pow(cb, d) * nu_d / (z * std::pow(1.0 + std::pow(z, d - 1), d + 1));
}

// integrals over z: vertices per unit length (d=2) and per unit area (d=3)
inline double vertex_rate_2d(double s) { return 3.0 / (kPi * s); }
inline double vertex_rate_3d(double s, double nu3) {
    return 32.0 * nu3 / (kPi * kPi * kPi * s);
}

inline constexpr double kNu2 = 3.0 * kPi / 4.0;
inline constexpr double kNu3Reference = 2.783;  // +- 0.001

inline double mean_edge_length_2d() { return 4.0 / 3.0; }
inline double mean_face_area_3d(double nu3) { return kPi * kPi * kPi / (12.0 * nu3); }
inline double length_area_ratio_2d() { return 4.0 / kPi; }

// ---- the dimensional constant nu_d by Monte Carlo ----
// nu_d = (d-1)!/2^d * int over [0,1]^d x (S_{d-2})^d of
//        prod v^{(d-3)/2} (1-v)^{(d-1)/2} * Vol_{d-1}((sqrt(v/(1-v)) u_i))
// with Vol the Euclidean simplex volume |det(p_2-p_1,...)|/(d-1)!.
// The substitution v = sin^2(phi) (so sqrt(v/(1-v)) = tan(phi)) removes the
// endpoint singularity and leaves a bounded integrand:
// nu_d = (d-1)! (Omega_{d-1} pi/2)^d E[ prod sin^{d-2} cos^d * Vol((tan(phi_i) u_i)) ].

struct MonteCarloEstimate {
    double estimate = 0.0;
    double stderr_ = 0.0;
    std::uint64_t n_samples = 0;
};

namespace detail {

// |det| by Gaussian elimination with partial pivoting; m is n x n row-major
inline double abs_det(std::vector<double>& m, int n) {
    double det = 1.0;
    for (int col = 0; col < n; ++col) {
        int piv = col;
        for (int row = col + 1; row < n; ++row)
            if (std::fabs(m[row * n + col]) > std::fabs(m[piv * n + col])) piv = row;
        if (m[piv * n + col] == 0.0) return 0.0;
        if (piv != col)
            for (int j = 0; j < n; ++j) std::swap(m[piv * n + j], m[col * n + j]);
        det *= m[col * n + col];
        for (int row = col + 1; row < n; ++row) {
            const double f = m[row * n + col] / m[col * n + col];
            for (int j = col; j < n; ++j) m[row * n + j] -= f * m[col * n + j];
        }
    }
    return std::fabs(det);
}

}  // namespace detail

inline MonteCarloEstimate nu_d_mc(int d, std::uint64_t n_samples, RngStream& rng) {
    hyp::check_dim(d);
    const double scale = std::tgamma(static_cast<double>(d)) *
                         std::pow(hyp::sphere_surface(d - 1) * 0.5 * kPi, d);
    const double inv_fact = 1.0 / std::tgamma(static_cast<double>(d));  // 1/(d-1)!
    double sum = 0.0, sumsq = 0.0;
    std::vector<double> pts(static_cast<std::size_t>(d) * (d - 1));
    std::vector<double> edges(static_cast<std::size_t>(d - 1) * (d - 1));
    std::vector<double> dir(d - 1);
    for (std::uint64_t k = 0; k < n_samples; ++k) {
        double w = 1.0;
        for (int i = 0; i < d; ++i) {
            const double phi = 0.5 * kPi * rng.u01();
            const double sn = std::sin(phi), cs = std::cos(phi);
            w *= std::pow(sn, d - 2) * std::pow(cs, d);
            const double t = sn / cs;
            rng.sphere_dir(std::span<double>(dir));
            for (int j = 0; j < d - 1; ++j) pts[i * (d - 1) + j] = t * dir[j];
        }
        double vol;
        if (d == 2) {
            vol = std::fabs(pts[1] - pts[0]);
        } else if (d == 3) {
            const double ax = pts[2] - pts[0], ay = pts[3] - pts[1];
            const double bx = pts[4] - pts[0], by = pts[5] - pts[1];
            vol = 0.5 * std::fabs(ax * by - ay * bx);
        } else {
            for (int i = 1; i < d; ++i)
                for (int j = 0; j < d - 1; ++j)
                    edges[(i - 1) * (d - 1) + j] = pts[i * (d - 1) + j] - pts[j];
            vol = detail::abs_det(edges, d - 1) * inv_fact;
        }
        const double val = scale * w * vol;
        sum += val;
        sumsq += val * val;
    }
    MonteCarloEstimate out;
    out.n_samples = n_samples;
    out.estimate = sum / n_samples;
    if (n_samples > 1) {
        const double var = (sumsq - sum * sum / n_samples) / (n_samples - 1.0);
        out.stderr_ = std::sqrt(std::max(var, 0.0) / n_samples);
    }
    return out;
}

// ---- root-degree pmf of the ideal tessellation on the k-regular tree ----

inline double tree_root_degree_pmf(int k, int j) {
    if (k < 3) throw std::domain_error("tree_root_degree_pmf: k must be >= 3");
    if (j < 1 || j > k) throw std::domain_error("tree_root_degree_pmf: j must lie in [1, k]");
    double p = 1.0 / ((k - 2) * (j - 1) + 1);
    for (int i = j; i <= k - 1; ++i) p /= 1.0 + 1.0 / (static_cast<double>(i) * (k - 2));
    return p;
}

}  // namespace ipv::analytic
