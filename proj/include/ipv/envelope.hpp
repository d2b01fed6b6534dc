#pragma once

// Upper envelope of the half-sphere cloud: exact arc decomposition, vertex
// extraction, arc length and hyperbolic area in d=2, and vertex enumeration
// in d=3.
//
// In d=2 the squared heights h_i(x)^2 = rho_i^2 - (x-c_i)^2 are parabolas
// with a common leading coefficient, so envelope comparisons reduce to the
// linear functions g_i(x) = 2 c_i x + (rho_i^2 - c_i^2); two arcs cross at
// most once and the breakpoint is the root of a linear equation.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "ipv/deposition.hpp"

namespace ipv::cell {

inline constexpr double kTangencyTol = 1e-12;

// Drop spheres lying entirely under another sphere: rho_j >= rho_i + |c_i-c_j|
// is pointwise domination, so removal cannot change the envelope. Returns
// the kept indices (ascending).
inline std::vector<std::size_t> filter_dominated_2d(const std::vector<double>& c,
                                                    const std::vector<double>& rho) {
    const std::size_t n = c.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    // interval containment sweep: sort by left asc, right desc
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        const double la = c[a] - rho[a], lb = c[b] - rho[b];
        if (la != lb) return la < lb;
        const double ra = c[a] + rho[a], rb = c[b] + rho[b];
        if (ra != rb) return ra > rb;
        return a < b;
    });
    std::vector<std::size_t> kept;
    double max_right = -std::numeric_limits<double>::infinity();
    for (std::size_t idx : order) {
        const double right = c[idx] + rho[idx];
        if (right > max_right) {
            kept.push_back(idx);
            max_right = right;
        }
    }
    std::sort(kept.begin(), kept.end());
    return kept;
}

inline std::vector<std::size_t> filter_dominated_3d(const std::vector<double>& cx,
                                                    const std::vector<double>& cy,
                                                    const std::vector<double>& rho) {
    const std::size_t n = rho.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (rho[a] != rho[b]) return rho[a] > rho[b];
        return a < b;
    });
    constexpr double kCell = 1.0;
    constexpr double kLargeRho = 1.0;
    struct Grid {
        double origin_x = 0.0, origin_y = 0.0;
        std::size_t nx = 0, ny = 0;
        std::vector<std::vector<std::uint32_t>> cells;
    } grid;
    double xmin = 0, xmax = 0, ymin = 0, ymax = 0;
    for (std::size_t i = 0; i < n; ++i) {
        xmin = std::min(xmin, cx[i]); xmax = std::max(xmax, cx[i]);
        ymin = std::min(ymin, cy[i]); ymax = std::max(ymax, cy[i]);
    }
    grid.origin_x = xmin; grid.origin_y = ymin;
    grid.nx = static_cast<std::size_t>((xmax - xmin) / kCell) + 1;
    grid.ny = static_cast<std::size_t>((ymax - ymin) / kCell) + 1;
    grid.cells.resize(grid.nx * grid.ny);
    auto cell_of = [&](double x, double y) {
        const std::size_t gx = std::min(grid.nx - 1, static_cast<std::size_t>(
            std::max(0.0, (x - grid.origin_x) / kCell)));
        const std::size_t gy = std::min(grid.ny - 1, static_cast<std::size_t>(
            std::max(0.0, (y - grid.origin_y) / kCell)));
        return gx * grid.ny + gy;
    };

    std::vector<std::uint32_t> kept_large;
    std::vector<std::size_t> kept;
    for (std::size_t idx : order) {
        bool contained = false;
        for (std::uint32_t j : kept_large) {
            const double dr = rho[j] - rho[idx];
            const double d2 = (cx[j] - cx[idx]) * (cx[j] - cx[idx]) +
                              (cy[j] - cy[idx]) * (cy[j] - cy[idx]);
            if (d2 <= dr * dr) { contained = true; break; }
        }
        if (!contained) {
            // small containers are within distance < kLargeRho, one cell ring
            const std::size_t gx = cell_of(cx[idx], cy[idx]) / grid.ny;
            const std::size_t gy = cell_of(cx[idx], cy[idx]) % grid.ny;
            for (std::size_t ax = gx > 0 ? gx - 1 : 0; !contained && ax <= std::min(gx + 1, grid.nx - 1); ++ax)
                for (std::size_t ay = gy > 0 ? gy - 1 : 0; !contained && ay <= std::min(gy + 1, grid.ny - 1); ++ay)
                    for (std::uint32_t j : grid.cells[ax * grid.ny + ay]) {
                        const double dr = rho[j] - rho[idx];
                        if (dr < 0) continue;
                        const double d2 = (cx[j] - cx[idx]) * (cx[j] - cx[idx]) +
                                          (cy[j] - cy[idx]) * (cy[j] - cy[idx]);
                        if (d2 <= dr * dr) { contained = true; break; }
                    }
        }
        if (contained) continue;
        kept.push_back(idx);
        if (rho[idx] >= kLargeRho)
            kept_large.push_back(static_cast<std::uint32_t>(idx));
        else
            grid.cells[cell_of(cx[idx], cy[idx])].push_back(static_cast<std::uint32_t>(idx));
    }
    std::sort(kept.begin(), kept.end());
    return kept;
}

struct Vertex2D {
    double x = 0.0;
    double z = 0.0;
    std::array<std::size_t, 2> sphere_indices{0, 0};
};

struct Arc2D {
    std::size_t sphere_index = 0;
    double x0 = 0.0;
    double x1 = 0.0;
};

struct Envelope2D {
    std::vector<Arc2D> arcs;
    std::vector<Vertex2D> vertices;
    double total_length = 0.0;          // Euclidean arc length
    double hyperbolic_length = 0.0;     // length in the half-plane metric, int dx/(H sin Theta)
    double hyperbolic_area_above = 0.0; // area above the envelope, int dx/H
    std::uint64_t tangency_count = 0;
    std::uint64_t dominated_removed = 0;
};

inline Envelope2D envelope_2d(const DepositionSample& sample, double a, double b) {
    if (sample.d != 2) throw std::invalid_argument("envelope_2d: requires d = 2");
    if (!(a < b)) throw std::invalid_argument("envelope_2d: empty interval");
    if (a < -sample.window_A - 1e-12 || b > sample.window_A + 1e-12)
        throw std::invalid_argument("envelope_2d: interval outside the certified window");

    const auto kept = filter_dominated_2d(sample.cx, sample.rho);
    Envelope2D env;
    env.dominated_removed = sample.size() - kept.size();
    std::vector<double> c(kept.size()), r(kept.size());
    for (std::size_t i = 0; i < kept.size(); ++i) {
        c[i] = sample.cx[kept[i]];
        r[i] = sample.rho[kept[i]];
    }
    const std::size_t n = c.size();
    auto g = [&](std::size_t i, double x) { return r[i] * r[i] - (x - c[i]) * (x - c[i]); };

    std::vector<std::pair<double, double>> gaps;
    double x = a;
    std::ptrdiff_t cur = -1;
    // pick the winner at the left endpoint (ties to the lower sphere index)
    {
        double best = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double v = g(i, x);
            if (v > best) { best = v; cur = static_cast<std::ptrdiff_t>(i); }
        }
    }
    while (x < b) {
        if (cur < 0) {
            // uncovered: jump to the next shadow start (a shadow opening
            // exactly at x counts and produces no gap)
            double next = b;
            std::ptrdiff_t who = -1;
            for (std::size_t i = 0; i < n; ++i) {
                const double start = c[i] - r[i];
                if (start >= x && start < next) { next = start; who = static_cast<std::ptrdiff_t>(i); }
            }
            if (next > x) gaps.emplace_back(x, next);
            x = next;
            cur = who;
            continue;
        }
        const std::size_t i = static_cast<std::size_t>(cur);
        // next crossing: only spheres with larger center can overtake
        double x_next = b;
        std::ptrdiff_t nxt = -1;
        for (std::size_t j = 0; j < n; ++j) {
            if (j == i || c[j] <= c[i]) continue;
            // 2 c_i x + r_i^2 - c_i^2 = 2 c_j x + r_j^2 - c_j^2
            const double xs = ((r[i] * r[i] - c[i] * c[i]) - (r[j] * r[j] - c[j] * c[j])) /
                              (2.0 * (c[j] - c[i]));
            if (xs <= x || xs > x_next) continue;
            if (xs == x_next && nxt >= 0 && j > static_cast<std::size_t>(nxt)) continue;
            x_next = xs;
            nxt = static_cast<std::ptrdiff_t>(j);
        }
        const double shadow_end = c[i] + r[i];
        double x_end = std::min(x_next, b);
        bool ends_in_gap = false;
        if (shadow_end < x_end) {
            x_end = shadow_end;
            ends_in_gap = true;
        }
        env.arcs.push_back({kept[i], x, x_end});
        // per arc: Euclidean length rho * d(asin u), area above d(asin u),
        // hyperbolic length d(artanh u), with u = (x - c)/rho
        const double u0 = std::clamp((x - c[i]) / r[i], -1.0, 1.0);
        const double u1 = std::clamp((x_end - c[i]) / r[i], -1.0, 1.0);
        env.total_length += r[i] * (std::asin(u1) - std::asin(u0));
        env.hyperbolic_area_above += std::asin(u1) - std::asin(u0);
        env.hyperbolic_length += std::atanh(u1) - std::atanh(u0);
        if (ends_in_gap) {
            x = x_end;
            cur = -1;
            continue;
        }
        if (x_end >= b) break;
        const std::size_t j = static_cast<std::size_t>(nxt);
        const double z2 = g(i, x_end);
        if (z2 > 0.0) {
            Vertex2D v;
            v.x = x_end;
            v.z = std::sqrt(z2);
            v.sphere_indices = {kept[i], kept[j]};
            env.vertices.push_back(v);
            if (std::fabs(g(j, x_end) - z2) < kTangencyTol) env.tangency_count++;
        }
        x = x_end;
        cur = static_cast<std::ptrdiff_t>(j);
    }
    if (!gaps.empty()) {
        std::ostringstream msg;
        msg << "envelope_2d: uncovered sub-intervals:";
        for (auto& gp : gaps) msg << " [" << gp.first << ", " << gp.second << ")";
        throw std::runtime_error(msg.str());
    }
    return env;
}

struct Vertex3D {
    std::array<double, 2> base{0.0, 0.0};
    double z = 0.0;
    std::array<std::size_t, 3> sphere_indices{0, 0, 0};
};

struct Vertices3DReport {
    std::vector<Vertex3D> vertices;
    std::uint64_t degenerate_skipped = 0;
    std::uint64_t dominated_removed = 0;
};

// All triples of sphere boundaries meeting at a point above every other
// sphere, with base point inside [-L, L]^2.
inline Vertices3DReport vertices_3d(const DepositionSample& sample, double L) {
    if (sample.d != 3) throw std::invalid_argument("vertices_3d: requires d = 3");
    if (L <= 0.0 || L > sample.window_A + 1e-12)
        throw std::invalid_argument("vertices_3d: box must lie in the certified window");
    const auto kept = filter_dominated_3d(sample.cx, sample.cy, sample.rho);
    Vertices3DReport rep;
    rep.dominated_removed = sample.size() - kept.size();
    const std::size_t n = kept.size();
    std::vector<double> cx(n), cy(n), r(n);
    for (std::size_t i = 0; i < n; ++i) {
        cx[i] = sample.cx[kept[i]];
        cy[i] = sample.cy[kept[i]];
        r[i] = sample.rho[kept[i]];
    }

    auto overlap = [&](std::size_t i, std::size_t j) {
        const double d2 = (cx[i] - cx[j]) * (cx[i] - cx[j]) +
                          (cy[i] - cy[j]) * (cy[i] - cy[j]);
        const double rr = r[i] + r[j];
        return d2 <= rr * rr;
    };

    // neighbor lists under shadow overlap
    std::vector<std::vector<std::uint32_t>> nbr(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            if (overlap(i, j)) nbr[i].push_back(static_cast<std::uint32_t>(j));

    // spatial index for the above-all check: a sphere above height z at (X,Y)
    // needs |(X,Y)-c| < rho, so small spheres are found in a one-cell ring
    // and the few large ones are scanned directly.
    constexpr double kCell = 1.0;
    constexpr double kLargeRho = 1.0;
    double xmin = -L, xmax = L, ymin = -L, ymax = L;
    for (std::size_t i = 0; i < n; ++i) {
        xmin = std::min(xmin, cx[i]); xmax = std::max(xmax, cx[i]);
        ymin = std::min(ymin, cy[i]); ymax = std::max(ymax, cy[i]);
    }
    const std::size_t gnx = static_cast<std::size_t>((xmax - xmin) / kCell) + 1;
    const std::size_t gny = static_cast<std::size_t>((ymax - ymin) / kCell) + 1;
    std::vector<std::vector<std::uint32_t>> gcell(gnx * gny);
    std::vector<std::uint32_t> large;
    auto cell_xy = [&](double x, double y) {
        const std::size_t gx = std::min(gnx - 1, static_cast<std::size_t>(std::max(0.0, (x - xmin) / kCell)));
        const std::size_t gy = std::min(gny - 1, static_cast<std::size_t>(std::max(0.0, (y - ymin) / kCell)));
        return std::pair<std::size_t, std::size_t>{gx, gy};
    };
    for (std::size_t i = 0; i < n; ++i) {
        if (r[i] >= kLargeRho) {
            large.push_back(static_cast<std::uint32_t>(i));
        } else {
            auto [gx, gy] = cell_xy(cx[i], cy[i]);
            gcell[gx * gny + gy].push_back(static_cast<std::uint32_t>(i));
        }
    }
    auto some_sphere_above = [&](double X, double Y, double z2, std::size_t i, std::size_t j,
                                 std::size_t k) {
        for (std::uint32_t m : large) {
            if (m == i || m == j || m == k) continue;
            const double h2 = r[m] * r[m] - (X - cx[m]) * (X - cx[m]) - (Y - cy[m]) * (Y - cy[m]);
            if (h2 > z2 + 1e-9) return true;
        }
        auto [gx, gy] = cell_xy(X, Y);
        for (std::size_t ax = gx > 0 ? gx - 1 : 0; ax <= std::min(gx + 1, gnx - 1); ++ax)
            for (std::size_t ay = gy > 0 ? gy - 1 : 0; ay <= std::min(gy + 1, gny - 1); ++ay)
                for (std::uint32_t m : gcell[ax * gny + ay]) {
                    if (m == i || m == j || m == k) continue;
                    const double h2 = r[m] * r[m] - (X - cx[m]) * (X - cx[m]) -
                                      (Y - cy[m]) * (Y - cy[m]);
                    if (h2 > z2 + 1e-9) return true;
                }
        return false;
    };

    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t a = 0; a < nbr[i].size(); ++a) {
            const std::size_t j = nbr[i][a];
            for (std::size_t bq = a + 1; bq < nbr[i].size(); ++bq) {
                const std::size_t k = nbr[i][bq];
                if (!overlap(j, k)) continue;
                // radical point of the three circles
                const double a1 = 2.0 * (cx[j] - cx[i]), b1 = 2.0 * (cy[j] - cy[i]);
                const double c1 = (r[i] * r[i] - r[j] * r[j]) - (cx[i] * cx[i] - cx[j] * cx[j]) -
                                  (cy[i] * cy[i] - cy[j] * cy[j]);
                const double a2 = 2.0 * (cx[k] - cx[i]), b2 = 2.0 * (cy[k] - cy[i]);
                const double c2 = (r[i] * r[i] - r[k] * r[k]) - (cx[i] * cx[i] - cx[k] * cx[k]) -
                                  (cy[i] * cy[i] - cy[k] * cy[k]);
                const double det = a1 * b2 - a2 * b1;
                if (std::fabs(det) < 1e-13) {
                    rep.degenerate_skipped++;
                    continue;
                }
                const double X = (c1 * b2 - c2 * b1) / det;
                const double Y = (a1 * c2 - a2 * c1) / det;
                if (std::fabs(X) > L || std::fabs(Y) > L) continue;
                const double z2 = r[i] * r[i] - (X - cx[i]) * (X - cx[i]) - (Y - cy[i]) * (Y - cy[i]);
                if (z2 <= 0.0) continue;
                if (some_sphere_above(X, Y, z2, i, j, k)) continue;
                Vertex3D v;
                v.base = {X, Y};
                v.z = std::sqrt(z2);
                v.sphere_indices = {kept[i], kept[j], kept[k]};
                rep.vertices.push_back(v);
            }
        }
    }
    return rep;
}

}  // namespace ipv::cell
