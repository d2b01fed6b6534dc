#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>

#include "ipv/rng.hpp"
#include "ipv/stats.hpp"

using namespace ipv;

TEST_CASE("ks test calibration") {
    // uniform sample vs uniform CDF: p > 0.001 in at least 999/1000 seeds
    int low = 0;
    for (int seed = 0; seed < 1000; ++seed) {
        RngStream rng(seed, 778);
        std::vector<double> u(10000);
        for (auto& v : u) v = rng.u01();
        auto r = stats::ks_test(std::move(u), [](double t) {
            return std::clamp(t, 0.0, 1.0);
        });
        if (r.p_value <= 0.001) ++low;
    }
    CHECK(low <= 1);

    // power: shifted sample is rejected hard
    RngStream rng(4);
    std::vector<double> shifted(10000);
    for (auto& v : shifted) v = std::min(1.0, rng.u01() + 0.05);
    auto r = stats::ks_test(shifted, [](double t) { return std::clamp(t, 0.0, 1.0); });
    CHECK(r.p_value < 1e-6);

    // the empirical CDF of the sample itself is within 1/n
    std::vector<double> x(1000);
    for (auto& v : x) v = rng.u01();
    std::vector<double> sorted(x);
    std::sort(sorted.begin(), sorted.end());
    auto ecdf = [&](double t) {
        return static_cast<double>(std::upper_bound(sorted.begin(), sorted.end(), t) -
                                   sorted.begin()) / sorted.size();
    };
    auto rr = stats::ks_test(x, ecdf);
    CHECK(rr.statistic <= 1.0 / 1000 + 1e-12);

    CHECK_THROWS_AS(stats::ks_test({1.0, 2.0}, [](double) { return 0.5; }),
                    std::invalid_argument);
}

TEST_CASE("chi-square") {
    RngStream rng(8);
    // calibration on a fair 6-sided die
    int rejects = 0;
    for (int rep = 0; rep < 200; ++rep) {
        std::vector<double> obs(6, 0.0), expd(6, 1000.0);
        for (int i = 0; i < 6000; ++i) obs[rng.uniform_int(6)] += 1.0;
        if (stats::chi_square(obs, expd).p_value < 0.01) ++rejects;
    }
    CHECK(rejects <= 8);

    // power
    std::vector<double> obs{1200, 1000, 1000, 1000, 1000, 800};
    std::vector<double> expd(6, 1000.0);
    CHECK(stats::chi_square(obs, expd).p_value < 1e-6);

    CHECK_THROWS_AS(stats::chi_square({1.0, 2.0}, {3.0, 1.0}), std::invalid_argument);

    // two-sample: same law passes, different laws fail
    std::vector<double> a{500, 480, 520}, b{510, 470, 510};
    CHECK(stats::two_sample_chi_square(a, b).p_value > 0.01);
    std::vector<double> c{800, 300, 400};
    CHECK(stats::two_sample_chi_square(a, c).p_value < 1e-6);
}

TEST_CASE("spearman rank correlation") {
    RngStream rng(12);
    std::vector<double> x(5000), y(5000), z(5000);
    for (std::size_t i = 0; i < x.size(); ++i) {
        x[i] = rng.normal();
        y[i] = rng.normal();
        z[i] = x[i] * x[i] * x[i];  // monotone function of x
    }
    CHECK(std::fabs(stats::spearman(x, y)) < 0.05);
    CHECK(stats::spearman(x, z) == Catch::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("rng distributions") {
    RngStream rng(33);
    // Poisson sampler across the inversion/rejection switch
    for (double mean : {0.5, 5.0, 25.0, 80.0, 400.0, 4000.0}) {
        const int n = mean > 100 ? 4000 : 20000;
        double sum = 0.0, sumsq = 0.0;
        for (int i = 0; i < n; ++i) {
            const double k = static_cast<double>(rng.poisson(mean));
            sum += k;
            sumsq += k * k;
        }
        const double m = sum / n;
        const double var = sumsq / n - m * m;
        CHECK(std::fabs(m - mean) < 4.0 * std::sqrt(mean / n));
        CHECK(std::fabs(var - mean) < 5.0 * mean * std::sqrt(2.0 / n) + 0.05 * std::sqrt(mean));
    }
    // exponential and normal moments
    double es = 0.0, ns = 0.0, ns2 = 0.0;
    const int n = 200000;
    for (int i = 0; i < n; ++i) {
        es += rng.exponential();
        const double g = rng.normal();
        ns += g;
        ns2 += g * g;
    }
    CHECK(std::fabs(es / n - 1.0) < 0.01);
    CHECK(std::fabs(ns / n) < 0.01);
    CHECK(std::fabs(ns2 / n - 1.0) < 0.02);
    // streams are reproducible and distinct
    RngStream a(9, 1), b(9, 1), c(9, 2);
    CHECK(a.next_u64() == b.next_u64());
    CHECK(a.next_u64() != c.next_u64());
}
