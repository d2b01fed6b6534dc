#pragma once

// Test statistics used by the verification harness: one-sample
// Kolmogorov-Smirnov, Pearson chi-square (one- and two-sample), Spearman
// rank correlation, and simple mean/stderr aggregation.

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "ipv/specfun.hpp"

namespace ipv::stats {

inline constexpr double kPValueFloor = 1e-12;

struct TestResult {
    double statistic = 0.0;
    double p_value = 1.0;
};

// One-sample KS against a continuous CDF, asymptotic p-value.
inline TestResult ks_test(std::vector<double> sample, const std::function<double(double)>& cdf) {
    const std::size_t n = sample.size();
    if (n < 10) throw std::invalid_argument("ks_test: need at least 10 samples");
    std::sort(sample.begin(), sample.end());
    double d = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double F = cdf(sample[i]);
        const double lo = static_cast<double>(i) / n;
        const double hi = static_cast<double>(i + 1) / n;
        d = std::max(d, std::max(F - lo, hi - F));
    }
    const double p = std::max(kolmogorov_sf(std::sqrt(static_cast<double>(n)) * d), kPValueFloor);
    return {d, p};
}

inline TestResult chi_square(const std::vector<double>& observed,
                             const std::vector<double>& expected) {
    if (observed.size() != expected.size() || observed.empty())
        throw std::invalid_argument("chi_square: size mismatch");
    double stat = 0.0;
    for (std::size_t i = 0; i < observed.size(); ++i) {
        if (expected[i] < 5.0)
            throw std::invalid_argument(
                "chi_square: expected count below 5; increase replications");
        const double diff = observed[i] - expected[i];
        stat += diff * diff / expected[i];
    }
    const double df = static_cast<double>(observed.size() - 1);
    const double p = std::max(gammq(0.5 * df, 0.5 * stat), kPValueFloor);
    return {stat, p};
}

// Two-sample chi-square for equality of two multinomial laws.
inline TestResult two_sample_chi_square(const std::vector<double>& a,
                                        const std::vector<double>& b) {
    if (a.size() != b.size() || a.empty())
        throw std::invalid_argument("two_sample_chi_square: size mismatch");
    const double na = std::accumulate(a.begin(), a.end(), 0.0);
    const double nb = std::accumulate(b.begin(), b.end(), 0.0);
    double stat = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double tot = a[i] + b[i];
        const double ea = tot * na / (na + nb);
        const double eb = tot * nb / (na + nb);
        if (ea < 5.0 || eb < 5.0)
            throw std::invalid_argument(
                "two_sample_chi_square: expected count below 5; increase replications");
        stat += (a[i] - ea) * (a[i] - ea) / ea + (b[i] - eb) * (b[i] - eb) / eb;
    }
    const double df = static_cast<double>(a.size() - 1);
    const double p = std::max(gammq(0.5 * df, 0.5 * stat), kPValueFloor);
    return {stat, p};
}

inline std::vector<double> ranks(const std::vector<double>& x) {
    const std::size_t n = x.size();
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::sort(idx.begin(), idx.end(), [&](std::size_t i, std::size_t j) { return x[i] < x[j]; });
    std::vector<double> r(n);
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && x[idx[j + 1]] == x[idx[i]]) ++j;
        const double avg = 0.5 * (i + j) + 1.0;
        for (std::size_t k = i; k <= j; ++k) r[idx[k]] = avg;
        i = j + 1;
    }
    return r;
}

inline double spearman(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 3)
        throw std::invalid_argument("spearman: need matched samples of size >= 3");
    const auto rx = ranks(x), ry = ranks(y);
    const std::size_t n = x.size();
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < n; ++i) { mx += rx[i]; my += ry[i]; }
    mx /= n; my /= n;
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sxy += (rx[i] - mx) * (ry[i] - my);
        sxx += (rx[i] - mx) * (rx[i] - mx);
        syy += (ry[i] - my) * (ry[i] - my);
    }
    return sxy / std::sqrt(sxx * syy);
}

struct MeanStderr {
    double mean = 0.0;
    double stderr_ = 0.0;
    std::size_t n = 0;
};

inline MeanStderr mean_stderr(const std::vector<double>& v) {
    MeanStderr out;
    out.n = v.size();
    if (v.empty()) return out;
    out.mean = std::accumulate(v.begin(), v.end(), 0.0) / v.size();
    if (v.size() > 1) {
        double ss = 0.0;
        for (double x : v) ss += (x - out.mean) * (x - out.mean);
        out.stderr_ = std::sqrt(ss / (v.size() - 1.0) / v.size());
    }
    return out;
}

}  // namespace ipv::stats
