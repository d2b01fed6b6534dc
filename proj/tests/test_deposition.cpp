#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "ipv/analytic.hpp"
#include "ipv/deposition.hpp"
#include "ipv/stats.hpp"

using namespace ipv;

namespace {

cell::DepositionSample single_sphere(double c, double rho) {
    cell::DepositionSample s;
    s.d = 2;
    s.s = 1.0;
    s.window_A = 10.0;
    s.rho_min = 0.01;
    s.constrained = false;
    s.cx = {c};
    s.rho = {rho};
    return s;
}

}  // namespace

TEST_CASE("deposition sampler expected count") {
    RngStream rng(61);
    // unconstrained, centers-in-window count has mean c_bold*s/(2d-2) * 2A * rho_min^{2-2d}
    const double expected = 2.0 / kPi * 0.5 * 2.0 * 100.0;
    CHECK(expected == Catch::Approx(63.6619).epsilon(1e-4));
    const int runs = 1000;
    double total = 0.0;
    for (int it = 0; it < runs; ++it) {
        auto s = cell::sample_deposition(2, 1.0, 1.0, 0.1, false, rng);
        for (std::size_t i = 0; i < s.size(); ++i)
            if (std::fabs(s.cx[i]) <= s.window_A) total += 1.0;
        for (std::size_t i = 0; i < s.size(); ++i) {
            CHECK(s.rho[i] >= s.rho_min);
            // every kept sphere's shadow meets the window
            CHECK(std::fabs(s.cx[i]) - s.window_A <= s.rho[i] + 1e-12);
        }
    }
    CHECK(std::fabs(total / runs - expected) < 3.0 * std::sqrt(expected / runs));
}

TEST_CASE("constrained deposition respects the radius bound") {
    RngStream rng(67);
    for (int it = 0; it < 50; ++it) {
        auto s = cell::sample_deposition(2, 1.5, 2.0, 0.05, true, rng);
        for (std::size_t i = 0; i < s.size(); ++i)
            CHECK(s.rho[i] <= std::sqrt(1.0 + s.cx[i] * s.cx[i]) + 1e-12);
        // the origin representative (0, 1) is never strictly covered
        auto hp = cell::height_angle_at(std::vector<double>{0.0}, s);
        if (hp) CHECK(hp->H <= 1.0 + 1e-12);
        CHECK(cell::contains_hyperbolic_ball(s, 0.0));
    }
    for (int it = 0; it < 20; ++it) {
        auto s3 = cell::sample_deposition(3, 1.0, 1.5, 0.15, true, rng);
        for (std::size_t i = 0; i < s3.size(); ++i)
            CHECK(s3.rho[i] <=
                  std::sqrt(1.0 + s3.cx[i] * s3.cx[i] + s3.cy[i] * s3.cy[i]) + 1e-12);
    }
}

TEST_CASE("height and angle at a point") {
    auto s = single_sphere(0.0, 1.0);
    auto at0 = cell::height_angle_at(std::vector<double>{0.0}, s);
    REQUIRE(at0.has_value());
    CHECK(at0->H == Catch::Approx(1.0).epsilon(1e-14));
    CHECK(at0->Theta == Catch::Approx(0.5 * kPi).epsilon(1e-12));
    auto at6 = cell::height_angle_at(std::vector<double>{0.6}, s);
    REQUIRE(at6.has_value());
    CHECK(at6->H == Catch::Approx(0.8).epsilon(1e-12));
    CHECK(at6->Theta == Catch::Approx(std::acos(0.6)).epsilon(1e-12));
    CHECK(at6->sphere_index == 0);
    // outside the shadow: uncovered
    CHECK(!cell::height_angle_at(std::vector<double>{2.0}, s).has_value());
    CHECK_THROWS_AS(cell::height_angle_at(std::vector<double>{11.0}, s),
                    std::invalid_argument);
}

TEST_CASE("stationary height and angle laws") {
    RngStream rng(71);
    const int n = 10000;
    for (int d : {2, 3}) {
        const double s = 1.0;
        std::vector<double> inv_h(n), sin2(n), hs(n);
        for (int i = 0; i < n; ++i) {
            auto pt = cell::sample_height_angle(d, s, 0.05, rng);
            REQUIRE(pt.has_value());
            hs[i] = pt->H;
            inv_h[i] = 1.0 / std::pow(pt->H, d - 1);
            sin2[i] = std::sin(pt->Theta) * std::sin(pt->Theta);
        }
        auto kh = stats::ks_test(inv_h, [=](double t) { return 1.0 - std::exp(-s * t); });
        CHECK(kh.p_value > 0.01);
        auto ka = stats::ks_test(sin2, [=](double t) { return analytic::sin2_angle_cdf(d, t); });
        CHECK(ka.p_value > 0.01);
        CHECK(std::fabs(stats::spearman(hs, sin2)) < 0.03);
    }
    // conditional law through the windowed sampler as well (d=2)
    {
        std::vector<double> inv_h;
        inv_h.reserve(4000);
        for (int i = 0; i < 4000; ++i) {
            auto samp = cell::sample_deposition(2, 1.0, 0.5, 0.05, false, rng);
            auto pt = cell::height_angle_at(std::vector<double>{0.0}, samp);
            REQUIRE(pt.has_value());
            inv_h.push_back(1.0 / pt->H);
        }
        auto kh = stats::ks_test(inv_h, [](double t) { return 1.0 - std::exp(-t); });
        CHECK(kh.p_value > 0.01);
    }
    // averaged over s ~ Exp(1): P(H <= h) = h^{d-1}/(1+h^{d-1})
    for (int d : {2, 3}) {
        const double rho0 = d == 2 ? 1e-3 : 0.03;
        std::vector<double> hs;
        hs.reserve(n);
        int uncovered = 0;
        for (int i = 0; i < n; ++i) {
            const double s = rng.exponential();
            auto pt = cell::sample_height_angle(d, s, rho0, rng);
            if (!pt) { ++uncovered; continue; }
            hs.push_back(pt->H);
        }
        CHECK(uncovered < n / 100);
        auto kh = stats::ks_test(hs, [=](double t) { return analytic::height_cdf_avg(d, t); });
        CHECK(kh.p_value > 0.01);
    }
    // E[1/sin Theta] = 4/pi and E[1/(H sin Theta)] = 4/(pi s) in d=2; the
    // latter is the boundary length per unit horizontal in the half-plane
    {
        double sum = 0.0, sum_len = 0.0;
        const int m = 1000000;
        const double s = 2.0;
        for (int i = 0; i < m; ++i) {
            auto pt = cell::sample_height_angle(2, s, 0.02, rng);
            REQUIRE(pt.has_value());
            sum += 1.0 / std::sin(pt->Theta);
            sum_len += 1.0 / (pt->H * std::sin(pt->Theta));
        }
        CHECK(std::fabs(sum / m - 4.0 / kPi) < 0.01 * 4.0 / kPi);
        CHECK(std::fabs(sum_len / m - 4.0 / (kPi * s)) < 0.01 * 4.0 / (kPi * s));
    }
}

TEST_CASE("uncovered probability stays below the certified bound") {
    RngStream rng(73);
    const double s = 1.0, rho0 = 0.2;
    const int n = 20000;
    int uncovered = 0;
    for (int i = 0; i < n; ++i)
        if (!cell::sample_height_angle(2, s, rho0, rng)) ++uncovered;
    const double bound = std::exp(-s / rho0);  // documented per-point bound
    CHECK(static_cast<double>(uncovered) / n < 10.0 * bound);
    CHECK(uncovered > 0);  // exact rate exp(-4s/(pi rho0)) ~ 1.7e-3
}

TEST_CASE("hole probability via the deposition model") {
    RngStream rng(79);
    // d=2, r=1, averaged over s ~ Exp(1); window and truncation are exact
    // for the ball event (rho_min <= e^{-r}, A >= sinh r)
    const double r = 1.0;
    const int reps = 20000;
    int hits = 0;
    for (int it = 0; it < reps; ++it) {
        const double s = rng.exponential();
        auto samp = cell::sample_deposition(2, s, std::sinh(r) + 0.5,
                                            0.999 * std::exp(-r), true, rng);
        if (cell::contains_hyperbolic_ball(samp, r)) ++hits;
    }
    const double target = analytic::hole_prob(2, r);
    const double se = std::sqrt(target * (1.0 - target) / reps);
    CHECK(std::fabs(static_cast<double>(hits) / reps - target) < 3.5 * se);

    // unconstrained samples are rejected
    auto stat = cell::sample_deposition(2, 1.0, 1.0, 0.3, false, rng);
    CHECK_THROWS_AS(cell::contains_hyperbolic_ball(stat, 0.5), std::invalid_argument);

    // monotone in r on a fixed sample
    for (int it = 0; it < 200; ++it) {
        auto samp = cell::sample_deposition(2, rng.exponential(), 2.0, 0.1, true, rng);
        bool prev = cell::contains_hyperbolic_ball(samp, 1.2);
        for (double rr : {0.8, 0.4, 0.1}) {
            const bool now = cell::contains_hyperbolic_ball(samp, rr);
            if (prev) CHECK(now);
            prev = now;
        }
    }
}

TEST_CASE("fast hole event sampler agrees with the generic path") {
    RngStream rng(83);
    auto run_fast = [&](int d, double r, int reps) {
        int hits = 0;
        for (int it = 0; it < reps; ++it)
            if (cell::ball_free_event(d, r, rng.exponential(), rng)) ++hits;
        return static_cast<double>(hits) / reps;
    };
    // against the closed forms
    for (double r : {0.5, 1.0}) {
        const double est = run_fast(2, r, 20000);
        const double target = analytic::hole_prob(2, r);
        CHECK(std::fabs(est - target) < 3.5 * std::sqrt(target * (1 - target) / 20000));
    }
    {
        const double est = run_fast(3, 0.5, 20000);
        const double target = analytic::hole_prob(3, 0.5);
        CHECK(std::fabs(est - target) < 3.5 * std::sqrt(target * (1 - target) / 20000));
    }
    // against the generic sampler at matched parameters (d=3, r=0.5)
    {
        const double r = 0.5;
        const int reps = 8000;
        int hits = 0;
        for (int it = 0; it < reps; ++it) {
            const double s = rng.exponential();
            auto samp = cell::sample_deposition(3, s, std::sinh(r) + 0.5,
                                                0.999 * std::exp(-r), true, rng);
            if (cell::contains_hyperbolic_ball(samp, r)) ++hits;
        }
        const double generic = static_cast<double>(hits) / reps;
        const double fast = run_fast(3, r, 20000);
        const double se = std::sqrt(0.25 / reps) + std::sqrt(0.25 / 20000);
        CHECK(std::fabs(generic - fast) < 3.5 * se);
    }
    // conditional version
    {
        int hits = 0;
        const int reps = 20000;
        for (int it = 0; it < reps; ++it)
            if (cell::ball_free_event(3, 1.0, 2.0, rng)) ++hits;
        const double target = analytic::hole_prob(3, 1.0, 2.0);
        CHECK(std::fabs(static_cast<double>(hits) / reps - target) <
              3.5 * std::sqrt(target * (1 - target) / reps));
    }
}

TEST_CASE("covering the window") {
    RngStream rng(89);
    auto s = cell::sample_deposition(2, 1.0, 5.0, 0.01, true, rng);
    auto rep = cell::covering_check(s, 0.01);
    CHECK(rep.uncovered == 0);

    cell::DepositionSample empty;
    empty.d = 2;
    empty.window_A = 1.0;
    CHECK(cell::covering_check(empty, 0.1).uncovered_fraction == 1.0);

    // coupled samples: coarser truncation can only lose coverage
    auto fine = cell::sample_deposition(2, 0.3, 3.0, 0.005, false, rng);
    auto mid = cell::restrict_rho_min(fine, 0.02);
    auto coarse = cell::restrict_rho_min(fine, 0.08);
    const double f0 = cell::covering_check(fine, 0.01).uncovered_fraction;
    const double f1 = cell::covering_check(mid, 0.01).uncovered_fraction;
    const double f2 = cell::covering_check(coarse, 0.01).uncovered_fraction;
    CHECK(f0 <= f1);
    CHECK(f1 <= f2);

    // d=3 covering on a small window
    auto s3 = cell::sample_deposition(3, 1.0, 1.5, 0.05, true, rng);
    auto rep3 = cell::covering_check(s3, 0.05);
    CHECK(rep3.uncovered_fraction < 0.01);
}
