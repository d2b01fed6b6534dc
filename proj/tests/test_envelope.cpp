#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "ipv/analytic.hpp"
#include "ipv/envelope.hpp"
#include "ipv/stats.hpp"

using namespace ipv;

namespace {

cell::DepositionSample make_sample_2d(std::vector<double> cx, std::vector<double> rho,
                                      double A = 10.0) {
    cell::DepositionSample s;
    s.d = 2;
    s.window_A = A;
    s.rho_min = 0.01;
    s.constrained = false;
    s.cx = std::move(cx);
    s.rho = std::move(rho);
    return s;
}

}  // namespace

TEST_CASE("envelope of a single semicircle") {
    auto s = make_sample_2d({0.0}, {1.0});
    auto env = cell::envelope_2d(s, -0.5, 0.5);
    REQUIRE(env.arcs.size() == 1);
    CHECK(env.arcs[0].sphere_index == 0);
    CHECK(env.vertices.empty());
    CHECK(env.total_length == Catch::Approx(kPi / 3.0).epsilon(1e-12));
    CHECK(env.hyperbolic_area_above == Catch::Approx(kPi / 3.0).epsilon(1e-12));
}

TEST_CASE("two semicircles meet at a vertex") {
    auto s = make_sample_2d({0.0, 1.0}, {1.0, 1.0});
    auto env = cell::envelope_2d(s, -0.5, 1.5);
    REQUIRE(env.vertices.size() == 1);
    CHECK(env.vertices[0].x == Catch::Approx(0.5).epsilon(1e-13));
    CHECK(env.vertices[0].z == Catch::Approx(std::sqrt(3.0) / 2.0).epsilon(1e-13));
    REQUIRE(env.arcs.size() == 2);
    CHECK(env.arcs[0].sphere_index == 0);
    CHECK(env.arcs[1].sphere_index == 1);
}

TEST_CASE("uncovered interval raises with the gap listed") {
    auto s = make_sample_2d({0.0, 3.0}, {1.0, 1.0});
    CHECK_THROWS_WITH(cell::envelope_2d(s, -0.5, 3.5),
                      Catch::Matchers::ContainsSubstring("uncovered"));
}

TEST_CASE("dominated-sphere filters agree with brute force") {
    RngStream rng(97);
    // d = 2
    for (int it = 0; it < 30; ++it) {
        const std::size_t n = 150;
        std::vector<double> c(n), r(n);
        for (std::size_t i = 0; i < n; ++i) {
            c[i] = rng.uniform(-5.0, 5.0);
            r[i] = std::exp(rng.uniform(-2.5, 0.5));
        }
        auto kept = cell::filter_dominated_2d(c, r);
        std::vector<bool> is_kept(n, false);
        for (auto i : kept) is_kept[i] = true;
        for (std::size_t i = 0; i < n; ++i) {
            bool contained = false;
            for (std::size_t j = 0; j < n && !contained; ++j)
                if (j != i && r[j] >= r[i] + std::fabs(c[i] - c[j]) && (r[j] > r[i] || j < i))
                    contained = true;
            CHECK(is_kept[i] == !contained);
        }
    }
    // d = 3
    for (int it = 0; it < 10; ++it) {
        const std::size_t n = 300;
        std::vector<double> cx(n), cy(n), r(n);
        for (std::size_t i = 0; i < n; ++i) {
            cx[i] = rng.uniform(-4.0, 4.0);
            cy[i] = rng.uniform(-4.0, 4.0);
            r[i] = std::exp(rng.uniform(-2.5, 0.8));
        }
        auto kept = cell::filter_dominated_3d(cx, cy, r);
        std::vector<bool> is_kept(n, false);
        for (auto i : kept) is_kept[i] = true;
        for (std::size_t i = 0; i < n; ++i) {
            bool contained = false;
            for (std::size_t j = 0; j < n && !contained; ++j) {
                if (j == i) continue;
                const double dd = std::hypot(cx[i] - cx[j], cy[i] - cy[j]);
                if (r[j] >= r[i] + dd && (r[j] > r[i] || j < i)) contained = true;
            }
            CHECK(is_kept[i] == !contained);
        }
    }
}

TEST_CASE("envelope matches a dense-grid oracle") {
    RngStream rng(101);
    for (int it = 0; it < 20; ++it) {
        auto s = cell::sample_deposition(2, 1.0, 3.0, 0.05, false, rng);
        auto env = cell::envelope_2d(s, -2.0, 2.0);
        // reconstruct the height at grid points from the arcs and compare
        // with the brute-force argmax over all spheres
        std::size_t arc = 0;
        for (double x = -2.0 + 1e-6; x < 2.0; x += 0.002) {
            while (arc + 1 < env.arcs.size() && env.arcs[arc].x1 < x) ++arc;
            const auto& a = env.arcs[arc];
            REQUIRE(a.x0 <= x + 1e-12);
            REQUIRE(a.x1 >= x - 1e-12);
            const double ha = s.rho[a.sphere_index] * s.rho[a.sphere_index] -
                              (x - s.cx[a.sphere_index]) * (x - s.cx[a.sphere_index]);
            double best = -1.0;
            for (std::size_t i = 0; i < s.size(); ++i)
                best = std::max(best, s.rho[i] * s.rho[i] - (x - s.cx[i]) * (x - s.cx[i]));
            REQUIRE(ha == Catch::Approx(best).margin(1e-10));
        }
        // vertices sit on both named spheres and above all others
        for (const auto& v : env.vertices) {
            for (auto si : v.sphere_indices) {
                const double h2 = s.rho[si] * s.rho[si] - (v.x - s.cx[si]) * (v.x - s.cx[si]);
                REQUIRE(std::fabs(h2 - v.z * v.z) < 1e-9);
            }
            for (std::size_t i = 0; i < s.size(); ++i) {
                const double h2 = s.rho[i] * s.rho[i] - (v.x - s.cx[i]) * (v.x - s.cx[i]);
                REQUIRE(h2 <= v.z * v.z + 1e-9);
            }
        }
    }
}

TEST_CASE("planar envelope statistics match the stationary laws") {
    // vertex counts are strongly over-dispersed (one low sphere suppresses
    // vertices over a long stretch), so the rep count matters here
    RngStream rng(103);
    const double L = 100.0, A = 0.5 * L;
    const int reps = 150;
    for (double s_val : {1.0, 2.0}) {
        double verts = 0.0, hyplen = 0.0, euclen = 0.0, area = 0.0;
        double edge_len = 0.0, edges = 0.0;
        for (int it = 0; it < reps; ++it) {
            auto s = cell::sample_deposition(2, s_val, A, 0.03, false, rng);
            auto env = cell::envelope_2d(s, -A, A);
            verts += static_cast<double>(env.vertices.size());
            hyplen += env.hyperbolic_length;
            euclen += env.total_length;
            area += env.hyperbolic_area_above;
            // complete edges are the arcs with a vertex at both ends
            for (std::size_t a = 1; a + 1 < env.arcs.size(); ++a) {
                const auto& arc = env.arcs[a];
                const double cc = s.cx[arc.sphere_index], rr = s.rho[arc.sphere_index];
                edge_len += std::atanh((arc.x1 - cc) / rr) - std::atanh((arc.x0 - cc) / rr);
                edges += 1.0;
            }
        }
        // vertices per unit length: 3/(pi s)
        const double per_len = verts / (L * reps);
        CHECK(std::fabs(per_len / analytic::vertex_rate_2d(s_val) - 1.0) < 0.05);
        // hyperbolic boundary length per unit: E[1/(H sin Theta)] = 4/(pi s)
        const double len_per = hyplen / (L * reps);
        CHECK(std::fabs(len_per / (4.0 / (kPi * s_val)) - 1.0) < 0.04);
        // Euclidean length per unit: E[1/sin Theta] = 4/pi, independent of s
        CHECK(std::fabs(euclen / (L * reps) / (4.0 / kPi) - 1.0) < 0.03);
        // hyperbolic length/area ratio: 4/pi
        CHECK(std::fabs(hyplen / area - analytic::length_area_ratio_2d()) <
              0.03 * analytic::length_area_ratio_2d());
        // mean edge (hyperbolic) length: 4/3, independent of s
        CHECK(std::fabs(edge_len / edges - analytic::mean_edge_length_2d()) <
              0.03 * analytic::mean_edge_length_2d());
    }
}

TEST_CASE("three spheres meet above the circumcenter") {
    cell::DepositionSample s;
    s.d = 3;
    s.window_A = 5.0;
    s.constrained = false;
    s.rho_min = 0.01;
    // equilateral triangle with side 1, unit radii
    s.cx = {0.0, 1.0, 0.5};
    s.cy = {0.0, 0.0, std::sqrt(3.0) / 2.0};
    s.rho = {1.0, 1.0, 1.0};
    auto rep = cell::vertices_3d(s, 5.0);
    REQUIRE(rep.vertices.size() == 1);
    const auto& v = rep.vertices[0];
    CHECK(v.base[0] == Catch::Approx(0.5).epsilon(1e-12));
    CHECK(v.base[1] == Catch::Approx(std::sqrt(3.0) / 6.0).epsilon(1e-10));
    CHECK(v.z == Catch::Approx(std::sqrt(2.0 / 3.0)).epsilon(1e-12));
}

TEST_CASE("spatial vertex enumeration satisfies the defining equations") {
    RngStream rng(107);
    auto s = cell::sample_deposition(3, 1.0, 4.0, 0.2, false, rng);
    auto rep = cell::vertices_3d(s, 3.0);
    CHECK(rep.vertices.size() > 5);
    for (const auto& v : rep.vertices) {
        for (auto si : v.sphere_indices) {
            const double h2 = s.rho[si] * s.rho[si] -
                              (v.base[0] - s.cx[si]) * (v.base[0] - s.cx[si]) -
                              (v.base[1] - s.cy[si]) * (v.base[1] - s.cy[si]);
            REQUIRE(std::fabs(h2 - v.z * v.z) < 1e-9);
        }
        // above every other sphere
        for (std::size_t i = 0; i < s.size(); ++i) {
            const double h2 = s.rho[i] * s.rho[i] -
                              (v.base[0] - s.cx[i]) * (v.base[0] - s.cx[i]) -
                              (v.base[1] - s.cy[i]) * (v.base[1] - s.cy[i]);
            REQUIRE(h2 <= v.z * v.z + 1e-8);
        }
    }
}

TEST_CASE("spatial vertex intensity sanity") {
    RngStream rng(109);
    const double L = 5.0;
    double count = 0.0;
    const int reps = 6;
    for (int it = 0; it < reps; ++it) {
        auto s = cell::sample_deposition(3, 1.0, L + 1.0, 0.2, false, rng);
        count += static_cast<double>(cell::vertices_3d(s, L).vertices.size());
    }
    const double per_area = count / (reps * 4.0 * L * L);
    const double target = analytic::vertex_rate_3d(1.0, analytic::kNu3Reference);
    CHECK(std::fabs(per_area / target - 1.0) < 0.15);
}
