#pragma once

// Splittable counter-keyed RNG streams: every consumer receives a stream
// keyed by (seed, stream_id), so replications are reproducible regardless
// of scheduling and can run in parallel on disjoint streams.

#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

namespace ipv {

inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

// xoshiro256++ seeded via splitmix64 from (seed, stream) so that distinct
// stream ids give statistically independent sequences.
class RngStream {
  public:
    RngStream(std::uint64_t seed, std::uint64_t stream = 0) {
        std::uint64_t s = seed ^ (0xD1B54A32D192ED03ULL * (stream + 1));
        for (auto& w : state_) w = splitmix64(s);
    }

    std::uint64_t next_u64() {
        const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
        const std::uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = rotl(state_[3], 45);
        return result;
    }

    // uniform on [0,1) with 53 random bits
    double u01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // uniform on (0,1], safe as a log argument
    double u01_pos() { return 1.0 - u01(); }

    double uniform(double a, double b) { return a + (b - a) * u01(); }

    std::uint64_t uniform_int(std::uint64_t n) {
        // bitmask rejection; exact and portable
        if (n == 0) throw std::invalid_argument("uniform_int: n must be positive");
        std::uint64_t mask = n - 1;
        mask |= mask >> 1; mask |= mask >> 2; mask |= mask >> 4;
        mask |= mask >> 8; mask |= mask >> 16; mask |= mask >> 32;
        std::uint64_t v;
        do { v = next_u64() & mask; } while (v >= n);
        return v;
    }

    double exponential() { return -std::log(u01_pos()); }
    double exponential(double rate) { return exponential() / rate; }

    double normal() {
        if (has_spare_) { has_spare_ = false; return spare_; }
        double u, v, s;
        do {
            u = 2.0 * u01() - 1.0;
            v = 2.0 * u01() - 1.0;
            s = u * u + v * v;
        } while (s >= 1.0 || s == 0.0);
        const double m = std::sqrt(-2.0 * std::log(s) / s);
        spare_ = v * m;
        has_spare_ = true;
        return u * m;
    }

    std::uint64_t poisson(double mean) {
        if (!(mean >= 0)) throw std::invalid_argument("poisson: mean must be >= 0");
        if (mean == 0) return 0;
        if (mean < 30.0) return poisson_knuth(mean);
        return poisson_ptrs(mean);
    }

    // uniform direction on the unit sphere of R^n (n = 1 gives +-1)
    void sphere_dir(std::span<double> out) {
        const std::size_t n = out.size();
        if (n == 0) throw std::invalid_argument("sphere_dir: empty output");
        if (n == 1) { out[0] = (next_u64() & 1) ? 1.0 : -1.0; return; }
        double norm2;
        do {
            norm2 = 0.0;
            for (auto& x : out) { x = normal(); norm2 += x * x; }
        } while (norm2 == 0.0);
        const double inv = 1.0 / std::sqrt(norm2);
        for (auto& x : out) x *= inv;
    }

    std::vector<double> sphere_dir(std::size_t n) {
        std::vector<double> v(n);
        sphere_dir(std::span<double>(v));
        return v;
    }

  private:
    static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

    std::uint64_t poisson_knuth(double mean) {
        const double limit = std::exp(-mean);
        double prod = u01_pos();
        std::uint64_t k = 0;
        while (prod > limit) { prod *= u01_pos(); ++k; }
        return k;
    }

    // Hormann's PTRS transformed-rejection sampler; exact for mean >= ~10.
    std::uint64_t poisson_ptrs(double mean) {
        const double b = 0.931 + 2.53 * std::sqrt(mean);
        const double a = -0.059 + 0.02483 * b;
        const double inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
        const double vr = 0.9277 - 3.6224 / (b - 2.0);
        const double log_mean = std::log(mean);
        for (;;) {
            double u = u01() - 0.5;
            double v = u01();
            double us = 0.5 - std::fabs(u);
            double kf = std::floor((2.0 * a / us + b) * u + mean + 0.43);
            if (us >= 0.07 && v <= vr) return static_cast<std::uint64_t>(kf);
            if (kf < 0.0 || (us < 0.013 && v > us)) continue;
            double lhs = std::log(v * inv_alpha / (a / (us * us) + b));
            double rhs = kf * log_mean - mean - std::lgamma(kf + 1.0);
            if (lhs <= rhs) return static_cast<std::uint64_t>(kf);
        }
    }

    std::uint64_t state_[4];
    double spare_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace ipv
