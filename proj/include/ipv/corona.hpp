#pragma once

// The corona point process of ideal nuclei: boundary angles with radii
// (exponentials of delays), the separation field it induces, cell
// membership, the Mobius action on nuclei, perpendicular bisectors in the
// half-space, and the finite-intensity process used to study delays.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "ipv/hyperbolic.hpp"
#include "ipv/rng.hpp"

namespace ipv::corona {

using hyp::Vec;

struct CoronaPoint {
    Vec theta;   // boundary direction, unit vector in R^d
    double R;    // corona radius
    double D;    // delay; R = (c_d/(d-1)) e^{(d-1) D}
};

struct NucleusProcess {
    int d = 0;
    std::vector<CoronaPoint> nuclei;  // sorted by strictly increasing R
    std::uint64_t seed = 0;
    std::uint64_t stream = 0;
};

inline double delay_of_radius(double R, int d) {
    hyp::check_dim(d);
    if (R <= 0.0) throw std::domain_error("delay_of_radius: R must be positive");
    return std::log((d - 1) * R / hyp::dim_constants(d).c_d) / (d - 1);
}

inline double radius_of_delay(double D, int d) {
    hyp::check_dim(d);
    const auto dc = hyp::dim_constants(d);
    return dc.c_d / (d - 1) * std::exp((d - 1) * D);
}

// radii are the points of a unit-rate process on R_+, angles iid uniform
inline NucleusProcess sample_nuclei(int d, std::size_t n, RngStream& rng,
                                    std::uint64_t seed = 0, std::uint64_t stream = 0) {
    hyp::check_dim(d);
    NucleusProcess proc;
    proc.d = d;
    proc.seed = seed;
    proc.stream = stream;
    proc.nuclei.reserve(n);
    double R = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        R += rng.exponential();
        CoronaPoint pt;
        pt.theta = rng.sphere_dir(static_cast<std::size_t>(d));
        pt.R = R;
        pt.D = delay_of_radius(R, d);
        proc.nuclei.push_back(std::move(pt));
    }
    return proc;
}

inline NucleusProcess make_process(int d, std::vector<CoronaPoint> nuclei) {
    hyp::check_dim(d);
    for (std::size_t i = 1; i < nuclei.size(); ++i)
        if (!(nuclei[i].R > nuclei[i - 1].R))
            throw std::invalid_argument("make_process: radii must be strictly increasing");
    NucleusProcess proc;
    proc.d = d;
    proc.nuclei = std::move(nuclei);
    return proc;
}

inline double separation(std::span<const double> z, const CoronaPoint& nucleus, int d) {
    return nucleus.R / hyp::poisson_kernel(z, nucleus.theta, d);
}

struct SeparationValue {
    double value = std::numeric_limits<double>::infinity();
    std::size_t argmin_index = 0;  // 1-based position in the radius-sorted process
    bool truncation_unsafe = false;
};

// Minimizes R_i / K(z, theta_i). Since K(z,.) <= ((1+|z|)/(1-|z|))^{d-1},
// every nucleus with R_i above best * sup K is provably beaten, so the
// scan over radius-sorted nuclei stops early with a correctness
// certificate; truncation_unsafe reports that the process ran out first.
inline SeparationValue separation_field(std::span<const double> z, const NucleusProcess& proc) {
    if (proc.nuclei.empty()) throw std::invalid_argument("separation_field: empty process");
    hyp::check_ball(z);
    const double sup_k = hyp::poisson_kernel_sup(z, proc.d);
    SeparationValue out;
    for (std::size_t i = 0; i < proc.nuclei.size(); ++i) {
        const auto& nu = proc.nuclei[i];
        if (nu.R > out.value * sup_k) return out;  // no later nucleus can win
        const double s = separation(z, nu, proc.d);
        if (s < out.value) {
            out.value = s;
            out.argmin_index = i + 1;
        }
    }
    out.truncation_unsafe = true;
    return out;
}

// exhaustive scan, kept as the oracle for the truncated one
inline SeparationValue separation_field_exhaustive(std::span<const double> z,
                                                   const NucleusProcess& proc) {
    if (proc.nuclei.empty()) throw std::invalid_argument("separation_field: empty process");
    hyp::check_ball(z);
    SeparationValue out;
    for (std::size_t i = 0; i < proc.nuclei.size(); ++i) {
        const double s = separation(z, proc.nuclei[i], proc.d);
        if (s < out.value) {
            out.value = s;
            out.argmin_index = i + 1;
        }
    }
    out.truncation_unsafe = false;
    return out;
}

inline std::size_t cell_of(std::span<const double> z, const NucleusProcess& proc) {
    return separation_field(z, proc).argmin_index;
}

// closed tiles: membership by weak inequality
inline bool cell_membership(std::span<const double> z, std::size_t index,
                            const NucleusProcess& proc) {
    if (index == 0 || index > proc.nuclei.size())
        throw std::invalid_argument("cell_membership: index out of range");
    const double own = separation(z, proc.nuclei[index - 1], proc.d);
    for (std::size_t i = 0; i < proc.nuclei.size(); ++i) {
        if (i + 1 == index) continue;
        if (separation(z, proc.nuclei[i], proc.d) < own) return false;
    }
    return true;
}

// Mobius action on a nucleus: (theta, R) -> (phi(theta), R / K(phi^{-1}(o), theta)).
inline CoronaPoint mobius_corona(const hyp::Isometry& iso, const CoronaPoint& nucleus, int d) {
    CoronaPoint out;
    out.theta = hyp::apply_boundary(iso, nucleus.theta);
    out.R = nucleus.R / hyp::poisson_kernel(hyp::base_point(iso), nucleus.theta, d);
    out.D = delay_of_radius(out.R, d);
    return out;
}

inline NucleusProcess mobius_corona(const hyp::Isometry& iso, const NucleusProcess& proc) {
    NucleusProcess out;
    out.d = proc.d;
    out.seed = proc.seed;
    out.stream = proc.stream;
    out.nuclei.reserve(proc.nuclei.size());
    for (const auto& nu : proc.nuclei) out.nuclei.push_back(mobius_corona(iso, nu, proc.d));
    return out;
}

// Perpendicular bisector of the nuclei (infinity, r1) and (C, r) in the
// upper half-space: a Euclidean half-sphere centered at C with radius
// sqrt(1+|C|^2) (r1/r)^{1/(2(d-1))}.
struct BisectorSphere {
    Vec center;
    double rho;
};

inline BisectorSphere bisector_halfspace(double r1, std::span<const double> C, double r, int d) {
    hyp::check_dim(d);
    if (r1 <= 0.0 || r <= 0.0) throw std::domain_error("bisector_halfspace: radii must be positive");
    BisectorSphere b;
    b.center.assign(C.begin(), C.end());
    b.rho = std::sqrt(1.0 + hyp::norm2(C)) * std::pow(r1 / r, 1.0 / (2.0 * (d - 1)));
    return b;
}

// ---- finite-intensity point process (lambda^{d-1} x volume measure) ----

struct FinitePPPSample {
    int d = 0;
    double lambda = 0.0;
    double r_max = 0.0;
    std::vector<Vec> points;             // ball model, sorted by distance to origin
    std::vector<double> radial;          // matching hyperbolic distances to origin
};

inline FinitePPPSample sample_finite_ppp(int d, double lambda, double r_max, RngStream& rng) {
    hyp::check_dim(d);
    if (lambda <= 0.0 || r_max <= 0.0)
        throw std::domain_error("sample_finite_ppp: lambda and r_max must be positive");
    const double vol = hyp::volume_growth(d, r_max);
    const double total = std::pow(lambda, d - 1) * vol;
    if (total > 1e8)
        throw std::invalid_argument(
            "sample_finite_ppp: expected count exceeds 1e8, reduce r_max or lambda");
    const std::uint64_t n = rng.poisson(total);
    std::vector<double> dists(n);
    for (auto& r : dists) r = hyp::volume_growth_inverse(d, rng.u01() * vol);
    std::sort(dists.begin(), dists.end());
    FinitePPPSample out;
    out.d = d;
    out.lambda = lambda;
    out.r_max = r_max;
    out.radial = dists;
    out.points.reserve(n);
    for (double r : dists) {
        Vec dir = rng.sphere_dir(static_cast<std::size_t>(d));
        const double e = std::tanh(0.5 * r);  // Euclidean radius of the ball-model sphere
        for (auto& v : dir) v *= e;
        out.points.push_back(std::move(dir));
    }
    return out;
}

// delays d(o, X_i) - log(1/lambda), increasing
inline std::vector<double> empirical_delays(const FinitePPPSample& sample, double lambda) {
    if (sample.points.empty()) throw std::invalid_argument("empirical_delays: empty sample");
    std::vector<double> out(sample.radial);
    const double shift = std::log(1.0 / lambda);
    for (auto& v : out) v -= shift;
    return out;
}

// limiting CDF of the first delay: P(D_1 <= t) = 1 - exp(-(c_d/(d-1)) e^{(d-1)t})
inline double first_delay_limit_cdf(int d, double t) {
    const auto dc = hyp::dim_constants(d);
    return 1.0 - std::exp(-dc.c_d / (d - 1) * std::exp((d - 1) * t));
}

}  // namespace ipv::corona
