#pragma once

// The typical cell in the upper half-space: a Poisson cloud of half-spheres
// with intensity c_bold * s * dx rho^{1-2d} drho, optionally restricted by
// rho <= sqrt(1+|x|^2) (the deposition model; without the restriction, the
// stationary model of the boundary far from the origin). Supports d in {2,3}.
//
// Sampling is exact over the requested window: radii are drawn band by band
// on dyadic intervals [2^k rho_min, 2^{k+1} rho_min) with inverse-CDF in rho
// and centers uniform in the band-inflated window, thinned to spheres whose
// shadow meets the window (and to the constraint set when constrained).
// Bands stop once the residual expected count drops below 1e-9.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "ipv/hyperbolic.hpp"
#include "ipv/rng.hpp"

namespace ipv::cell {

using hyp::Vec;

struct HalfSphere {
    std::array<double, 2> center{0.0, 0.0};  // second coordinate unused for d=2
    double rho = 0.0;
};

struct SampleCounters {
    std::uint64_t proposals = 0;
    std::uint64_t kept = 0;
    std::uint64_t rejected_shadow = 0;
    std::uint64_t rejected_constraint = 0;
    std::uint64_t bands = 0;
};

struct DepositionSample {
    int d = 2;
    double s = 1.0;          // conditioning value of the smallest corona radius
    double window_A = 1.0;   // shadows must meet [-A, A]^{d-1}
    double rho_min = 0.1;    // small-radius truncation
    bool constrained = true; // true: deposition model; false: stationary model
    std::vector<double> cx;
    std::vector<double> cy;  // empty for d = 2
    std::vector<double> rho;
    SampleCounters counters;

    std::size_t size() const { return rho.size(); }
    HalfSphere sphere(std::size_t i) const {
        return {{cx[i], d == 3 ? cy[i] : 0.0}, rho[i]};
    }
};

inline void check_cell_dim(int d) {
    if (d != 2 && d != 3)
        throw std::domain_error("deposition model supports d = 2 or 3");
}

namespace detail {

inline double shadow_window_dist2(int d, double A, double x, double y) {
    const double dx = std::max(std::fabs(x) - A, 0.0);
    const double dy = d == 3 ? std::max(std::fabs(y) - A, 0.0) : 0.0;
    return dx * dx + dy * dy;
}

}  // namespace detail

inline DepositionSample sample_deposition(int d, double s, double window_A, double rho_min,
                                          bool constrained, RngStream& rng) {
    check_cell_dim(d);
    if (s <= 0.0 || window_A <= 0.0) throw std::domain_error("sample_deposition: s, window_A > 0");
    if (!(rho_min > 0.0 && rho_min < 1.0))
        throw std::domain_error("sample_deposition: rho_min must lie in (0,1)");
    const double cb_s = hyp::dim_constants(d).c_bold * s;
    const double inv_cd_s = s / hyp::dim_constants(d).c_d;  // = cb_s / (2d-2)
    {
        const double expected = inv_cd_s * std::pow(2.0 * window_A, d - 1) *
                                std::pow(rho_min, 2.0 - 2.0 * d);
        if (expected > 1e8)
            throw std::invalid_argument(
                "sample_deposition: expected count exceeds 1e8; raise rho_min or shrink window");
    }

    DepositionSample out;
    out.d = d;
    out.s = s;
    out.window_A = window_A;
    out.rho_min = rho_min;
    out.constrained = constrained;

    double lo = rho_min;
    for (;;) {
        const double hi = 2.0 * lo;
        const double v_hi = std::pow(lo, 2.0 - 2.0 * d);   // largest v in band
        const double v_lo = std::pow(hi, 2.0 - 2.0 * d);
        const double box = window_A + hi;                  // inflated half-width
        const double mass = inv_cd_s * std::pow(2.0 * box, d - 1) * (v_hi - v_lo);
        out.counters.bands++;
        const std::uint64_t n = rng.poisson(mass);
        for (std::uint64_t k = 0; k < n; ++k) {
            out.counters.proposals++;
            const double x = rng.uniform(-box, box);
            const double y = d == 3 ? rng.uniform(-box, box) : 0.0;
            const double v = v_lo + rng.u01() * (v_hi - v_lo);
            const double r = std::pow(v, 1.0 / (2.0 - 2.0 * d));
            if (detail::shadow_window_dist2(d, window_A, x, y) > r * r) {
                out.counters.rejected_shadow++;
                continue;
            }
            if (constrained && r * r > 1.0 + x * x + y * y) {
                out.counters.rejected_constraint++;
                continue;
            }
            out.cx.push_back(x);
            if (d == 3) out.cy.push_back(y);
            out.rho.push_back(r);
            out.counters.kept++;
        }
        // residual proposal mass over [hi, inf):
        // integral of cb_s (2A+4u)^{d-1} u^{1-2d} du, bounded elementarily
        const double p = d - 1.0;
        const double tail = cb_s * std::pow(2.0, d - 2) *
                            (std::pow(2.0 * window_A, p) * std::pow(hi, 2.0 - 2.0 * d) / (2.0 * d - 2.0) +
                             std::pow(4.0, p) * std::pow(hi, -p) / p);
        if (tail < 1e-9) break;
        lo = hi;
    }
    return out;
}

struct EnvelopePoint {
    std::array<double, 2> base{0.0, 0.0};
    double H = 0.0;
    double Theta = 0.0;           // tangent angle in (0, pi/2]
    std::size_t sphere_index = 0;
};

inline std::optional<EnvelopePoint> height_angle_at(std::span<const double> x0,
                                                    const DepositionSample& sample) {
    if (static_cast<int>(x0.size()) != sample.d - 1)
        throw std::invalid_argument("height_angle_at: x0 must lie in R^{d-1}");
    for (double c : x0)
        if (std::fabs(c) > sample.window_A)
            throw std::invalid_argument("height_angle_at: x0 outside the certified window");
    const double px = x0[0];
    const double py = sample.d == 3 ? x0[1] : 0.0;
    double best_h2 = -1.0;
    std::size_t best = 0;
    for (std::size_t i = 0; i < sample.size(); ++i) {
        const double dx = px - sample.cx[i];
        const double dy = sample.d == 3 ? py - sample.cy[i] : 0.0;
        const double h2 = sample.rho[i] * sample.rho[i] - dx * dx - dy * dy;
        if (h2 > best_h2) {
            best_h2 = h2;
            best = i;
        }
    }
    if (best_h2 <= 0.0) return std::nullopt;  // uncovered under rho_min truncation
    EnvelopePoint pt;
    pt.base = {px, py};
    pt.H = std::sqrt(best_h2);
    pt.Theta = std::acos(std::min(1.0, std::sqrt(std::max(0.0, 1.0 - best_h2 / (sample.rho[best] * sample.rho[best])))));
    pt.sphere_index = best;
    return pt;
}

// Exact sampler for the law of (H, Theta) at a single point of the
// stationary model: only spheres covering the point matter, and their
// restriction is itself Poisson with an elementary radial law.
inline std::optional<EnvelopePoint> sample_height_angle(int d, double s, double rho_min,
                                                        RngStream& rng) {
    check_cell_dim(d);
    if (s <= 0.0 || rho_min <= 0.0) throw std::domain_error("sample_height_angle: s, rho_min > 0");
    const double kappa = d == 2 ? 2.0 : kPi;  // volume of the unit ball in R^{d-1}
    const double mass = 2.0 * s / hyp::dim_constants(d).c_d * kappa * std::pow(rho_min, 1.0 - d);
    const std::uint64_t n = rng.poisson(mass);
    double best_h2 = -1.0, best_rho = 0.0;
    for (std::uint64_t k = 0; k < n; ++k) {
        const double rho = rho_min * std::pow(rng.u01_pos(), -1.0 / (d - 1.0));
        const double c = rho * std::pow(rng.u01(), 1.0 / (d - 1.0));  // |center - x0|
        const double h2 = rho * rho - c * c;
        if (h2 > best_h2) {
            best_h2 = h2;
            best_rho = rho;
        }
    }
    if (best_h2 <= 0.0) return std::nullopt;
    EnvelopePoint pt;
    pt.H = std::sqrt(best_h2);
    pt.Theta = std::acos(std::min(1.0, std::sqrt(std::max(0.0, 1.0 - best_h2 / (best_rho * best_rho)))));
    return pt;
}

// true iff no sampled sphere reaches the hyperbolic ball B_r(o); in the
// half-space model that ball is Euclidean with center (0,..,0,cosh r) and
// radius sinh r, and a sphere meets it iff sqrt(|x|^2+cosh^2 r) <= rho+sinh r.
inline bool contains_hyperbolic_ball(const DepositionSample& sample, double r) {
    if (!sample.constrained)
        throw std::invalid_argument("contains_hyperbolic_ball: requires the deposition model");
    if (r < 0.0) throw std::domain_error("contains_hyperbolic_ball: r must be >= 0");
    const double C2 = std::cosh(r) * std::cosh(r);
    const double Re = std::sinh(r);
    for (std::size_t i = 0; i < sample.size(); ++i) {
        const double x2 = sample.cx[i] * sample.cx[i] +
                          (sample.d == 3 ? sample.cy[i] * sample.cy[i] : 0.0);
        const double reach = sample.rho[i] + Re;
        if (x2 + C2 <= reach * reach) return false;
    }
    return true;
}

// One replication of the hole event, sampling only the ball-relevant region
// {(x,rho): sqrt(|x|^2+cosh^2 r) <= rho+sinh r, rho <= sqrt(1+|x|^2)} of the
// deposition model via banded domination in t = |x| plus thinning. Exact up
// to a residual mass below 1e-9; exits at the first relevant sphere.
inline bool ball_free_event(int d, double r, double s, RngStream& rng) {
    check_cell_dim(d);
    if (r < 0.0 || s <= 0.0) throw std::domain_error("ball_free_event: need r >= 0, s > 0");
    if (r == 0.0) return true;  // the constraint set excludes covering the origin point
    const double C = std::cosh(r), Re = std::sinh(r);
    const double inv_cd_s = s / hyp::dim_constants(d).c_d;
    const double omega = hyp::sphere_surface(d - 1);  // 2 for d=2, 2*pi for d=3
    const double p = d - 1.0;
    auto ell = [&](double t) { return std::sqrt(t * t + C * C) - Re; };

    double t_lo = 0.0;
    for (;;) {
        const double t_hi = std::max(1.4 * t_lo, t_lo + 0.5);
        const double v_hi = std::pow(ell(t_lo), 2.0 - 2.0 * d);          // ell increasing in t
        const double v_lo = std::pow(1.0 + t_hi * t_hi, 1.0 - d);
        if (v_hi > v_lo) {
            const double it = (std::pow(t_hi, p) - std::pow(t_lo, p)) / p;
            const double mass = inv_cd_s * omega * it * (v_hi - v_lo);
            const std::uint64_t n = rng.poisson(mass);
            for (std::uint64_t k = 0; k < n; ++k) {
                const double t = std::pow(std::pow(t_lo, p) +
                                          rng.u01() * (std::pow(t_hi, p) - std::pow(t_lo, p)),
                                          1.0 / p);
                const double v = v_lo + rng.u01() * (v_hi - v_lo);
                if (v <= std::pow(ell(t), 2.0 - 2.0 * d) && v >= std::pow(1.0 + t * t, 1.0 - d))
                    return false;  // a sphere meets the ball
            }
        }
        t_lo = t_hi;
        if (t_lo >= std::max(2.0 * Re + 2.0, 2.0)) {
            const double resid = inv_cd_s * omega * std::pow(2.0, 2.0 * d - 2.0) *
                                 std::pow(t_lo, 1.0 - d) / p;
            if (resid < 1e-9) return true;
        }
    }
}

struct CoveringReport {
    double uncovered_fraction = 0.0;
    std::uint64_t grid_points = 0;
    std::uint64_t uncovered = 0;
};

inline CoveringReport covering_check(const DepositionSample& sample, double grid_step) {
    if (grid_step <= 0.0) throw std::domain_error("covering_check: grid_step must be positive");
    const double A = sample.window_A;
    const std::size_t m = static_cast<std::size_t>(std::floor(2.0 * A / grid_step)) + 1;
    CoveringReport rep;
    if (sample.d == 2) {
        // sweep the sorted shadow intervals across the grid
        std::vector<std::pair<double, double>> iv(sample.size());
        for (std::size_t i = 0; i < sample.size(); ++i)
            iv[i] = {sample.cx[i] - sample.rho[i], sample.cx[i] + sample.rho[i]};
        std::sort(iv.begin(), iv.end());
        std::size_t next = 0;
        double covered_until = -std::numeric_limits<double>::infinity();
        for (std::size_t g = 0; g < m; ++g) {
            const double x = -A + g * grid_step;
            while (next < iv.size() && iv[next].first <= x) {
                covered_until = std::max(covered_until, iv[next].second);
                ++next;
            }
            rep.grid_points++;
            if (x > covered_until) rep.uncovered++;
        }
    } else {
        std::vector<std::uint8_t> covered(m * m, 0);
        for (std::size_t i = 0; i < sample.size(); ++i) {
            const double cx = sample.cx[i], cy = sample.cy[i], r = sample.rho[i];
            const auto clampi = [&](double v) {
                return std::min<std::ptrdiff_t>(m - 1, std::max<std::ptrdiff_t>(0,
                    static_cast<std::ptrdiff_t>(std::ceil((v + A) / grid_step))));
            };
            const std::ptrdiff_t gx0 = clampi(cx - r), gx1 = clampi(cx + r);
            for (std::ptrdiff_t gx = gx0; gx <= gx1; ++gx) {
                const double x = -A + gx * grid_step;
                const double w2 = r * r - (x - cx) * (x - cx);
                if (w2 < 0.0) continue;
                const double w = std::sqrt(w2);
                const std::ptrdiff_t gy0 = clampi(cy - w), gy1 = clampi(cy + w);
                for (std::ptrdiff_t gy = gy0; gy <= gy1; ++gy) {
                    const double y = -A + gy * grid_step;
                    if ((x - cx) * (x - cx) + (y - cy) * (y - cy) <= r * r)
                        covered[gx * m + gy] = 1;
                }
            }
        }
        rep.grid_points = m * m;
        for (auto c : covered)
            if (!c) rep.uncovered++;
    }
    rep.uncovered_fraction =
        rep.grid_points ? static_cast<double>(rep.uncovered) / rep.grid_points : 1.0;
    return rep;
}

// Restriction coupling: keep only spheres with rho >= new_rho_min. Used to
// compare truncation levels on a common realization.
inline DepositionSample restrict_rho_min(const DepositionSample& sample, double new_rho_min) {
    if (new_rho_min < sample.rho_min)
        throw std::invalid_argument("restrict_rho_min: can only coarsen the truncation");
    DepositionSample out;
    out.d = sample.d;
    out.s = sample.s;
    out.window_A = sample.window_A;
    out.rho_min = new_rho_min;
    out.constrained = sample.constrained;
    for (std::size_t i = 0; i < sample.size(); ++i) {
        if (sample.rho[i] >= new_rho_min) {
            out.cx.push_back(sample.cx[i]);
            if (sample.d == 3) out.cy.push_back(sample.cy[i]);
            out.rho.push_back(sample.rho[i]);
        }
    }
    return out;
}

}  // namespace ipv::cell
