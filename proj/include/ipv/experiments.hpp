#pragma once

// Experiment orchestration: named Monte Carlo experiments with analytic
// targets, JSON reports, and deterministic seeding. Every replication runs
// on its own RNG stream keyed by (seed, replication index) and results are
// reduced in index order, so reports are reproducible bit-for-bit.

#include <chrono>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "ipv/analytic.hpp"
#include "ipv/corona.hpp"
#include "ipv/deposition.hpp"
#include "ipv/envelope.hpp"
#include "ipv/parallel.hpp"
#include "ipv/stats.hpp"
#include "ipv/tree.hpp"

namespace ipv::experiments {

using json = nlohmann::json;

struct ExperimentConfig {
    std::string experiment;
    int d = 2;
    std::uint64_t seed = 0;
    bool seed_set = false;
    std::map<std::string, double> params;

    bool has(const std::string& k) const { return params.count(k) > 0; }
    double get(const std::string& k, double fallback) const {
        auto it = params.find(k);
        return it == params.end() ? fallback : it->second;
    }
    double require(const std::string& k) const {
        auto it = params.find(k);
        if (it == params.end())
            throw std::invalid_argument("config: missing required parameter '" + k + "'");
        return it->second;
    }
};

struct GfTest {
    double stat = 0.0;
    double p = 1.0;
};

struct ExperimentReport {
    std::string experiment;
    json params;
    double estimate = 0.0;
    double stderr_ = 0.0;
    std::optional<double> analytic;
    std::optional<double> z_score;
    std::optional<GfTest> ks;
    json counters = json::object();
    double runtime_seconds = 0.0;
};

inline json to_json(const ExperimentReport& r) {
    json j;
    j["experiment"] = r.experiment;
    j["params"] = r.params;
    j["estimate"] = r.estimate;
    j["stderr"] = r.stderr_;
    j["analytic"] = r.analytic ? json(*r.analytic) : json(nullptr);
    j["z_score"] = r.z_score ? json(*r.z_score) : json(nullptr);
    if (r.ks)
        j["ks"] = json{{"stat", r.ks->stat}, {"p", r.ks->p}};
    else
        j["ks"] = nullptr;
    j["counters"] = r.counters;
    j["runtime_seconds"] = r.runtime_seconds;
    return j;
}

inline const std::set<std::string>& known_experiments() {
    static const std::set<std::string> n{
        "hole-prob", "height-angle", "angle", "height-avg", "vertex-intensity",
        "edge-length", "length-area", "delays", "tree-degree", "covering",
        "isoperimetric", "nu-d"};
    return n;
}

inline void validate(const ExperimentConfig& cfg) {
    if (!known_experiments().count(cfg.experiment))
        throw std::invalid_argument("config: unknown experiment '" + cfg.experiment + "'");
    if (!cfg.seed_set) throw std::invalid_argument("config: missing required parameter 'seed'");
    if (cfg.d < 2) throw std::invalid_argument("config: d must be >= 2");
    static const std::map<std::string, std::set<std::string>> allowed = {
        {"hole-prob", {"r", "s", "reps"}},
        {"height-angle", {"s", "rho_min", "reps"}},
        {"angle", {"s", "rho_min", "reps"}},
        {"height-avg", {"rho_min", "reps"}},
        {"vertex-intensity", {"s", "window_A", "rho_min", "reps"}},
        {"edge-length", {"s", "window_A", "rho_min", "reps"}},
        {"length-area", {"s", "window_A", "rho_min", "reps"}},
        {"delays", {"lambda", "reps"}},
        {"tree-degree", {"k", "xi", "reps"}},
        {"covering", {"s", "window_A", "rho_min", "grid", "reps"}},
        {"isoperimetric", {}},
        {"nu-d", {"reps"}},
    };
    const auto& ok = allowed.at(cfg.experiment);
    for (const auto& [k, v] : cfg.params) {
        (void)v;
        if (!ok.count(k))
            throw std::invalid_argument("config: unknown parameter '" + k + "' for experiment '" +
                                        cfg.experiment + "'");
    }
}

namespace detail {

inline std::uint64_t reps_of(const ExperimentConfig& cfg, double fallback) {
    const double r = cfg.get("reps", fallback);
    if (r < 1) throw std::invalid_argument("config: reps must be >= 1");
    return static_cast<std::uint64_t>(r);
}

inline ExperimentReport base_report(const ExperimentConfig& cfg) {
    ExperimentReport rep;
    rep.experiment = cfg.experiment;
    rep.params = json::object();
    rep.params["d"] = cfg.d;
    rep.params["seed"] = cfg.seed;
    for (const auto& [k, v] : cfg.params) rep.params[k] = v;
    return rep;
}

inline void finish_moments(ExperimentReport& rep, const std::vector<double>& values) {
    auto ms = stats::mean_stderr(values);
    rep.estimate = ms.mean;
    rep.stderr_ = ms.stderr_;
    if (rep.analytic && rep.stderr_ > 0.0)
        rep.z_score = (rep.estimate - *rep.analytic) / rep.stderr_;
}

// --- individual experiments ---

inline ExperimentReport run_hole_prob(const ExperimentConfig& cfg) {
    cell::check_cell_dim(cfg.d);
    const double r = cfg.require("r");
    const std::uint64_t reps = reps_of(cfg, 100000);
    const bool conditional = cfg.has("s");
    const double s_fixed = cfg.get("s", 0.0);
    auto rep = base_report(cfg);
    auto hits = run_replications<char>(reps, [&](std::uint64_t i) -> char {
        RngStream rng(cfg.seed, i);
        const double s = conditional ? s_fixed : rng.exponential();
        return cell::ball_free_event(cfg.d, r, s, rng) ? 1 : 0;
    });
    double sum = 0.0;
    for (char h : hits) sum += h;
    const double p = sum / reps;
    rep.estimate = p;
    rep.stderr_ = std::sqrt(p * (1.0 - p) / reps);
    rep.analytic = conditional ? analytic::hole_prob(cfg.d, r, s_fixed)
                               : analytic::hole_prob(cfg.d, r);
    // z against the larger of the empirical and analytic binomial scales,
    // so degenerate counts at extreme probabilities stay interpretable
    const double pa = *rep.analytic;
    const double sigma = std::sqrt(std::max(p * (1.0 - p), pa * (1.0 - pa)) / reps);
    if (sigma > 0.0) rep.z_score = (p - pa) / sigma;
    rep.counters["region_residual_mass_bound"] = 1e-9;
    return rep;
}

inline ExperimentReport run_height_like(const ExperimentConfig& cfg) {
    cell::check_cell_dim(cfg.d);
    const bool averaged = cfg.experiment == "height-avg";
    const bool angle = cfg.experiment == "angle";
    const double s_fixed = averaged ? 0.0 : cfg.get("s", 1.0);
    const double default_rho0 = averaged ? (cfg.d == 2 ? 1e-3 : 0.03) : 0.05;
    const double rho0 = cfg.get("rho_min", default_rho0);
    const std::uint64_t reps = reps_of(cfg, 10000);
    auto rep = base_report(cfg);
    struct Draw { double value = -1.0; };
    auto draws = run_replications<Draw>(reps, [&](std::uint64_t i) -> Draw {
        RngStream rng(cfg.seed, i);
        const double s = averaged ? rng.exponential() : s_fixed;
        auto pt = cell::sample_height_angle(cfg.d, s, rho0, rng);
        if (!pt) return {};
        if (angle) return {std::sin(pt->Theta) * std::sin(pt->Theta)};
        if (averaged) return {pt->H};
        return {1.0 / std::pow(pt->H, cfg.d - 1)};
    });
    std::vector<double> values;
    values.reserve(reps);
    std::uint64_t uncovered = 0;
    for (const auto& d : draws) {
        if (d.value < 0.0) { ++uncovered; continue; }
        values.push_back(d.value);
    }
    if (values.size() < 10) throw std::runtime_error(cfg.experiment + ": too few covered samples");
    rep.counters["uncovered"] = uncovered;
    rep.counters["uncovered_bound_per_rep"] =
        averaged ? std::pow(rho0, cfg.d - 1) : std::exp(-s_fixed / std::pow(rho0, cfg.d - 1));
    const int d = cfg.d;
    if (angle) {
        auto ks = stats::ks_test(values, [d](double t) { return analytic::sin2_angle_cdf(d, t); });
        rep.ks = GfTest{ks.statistic, ks.p_value};
        rep.analytic = 0.5 * (d + 1) / d;  // Beta mean
        finish_moments(rep, values);
    } else if (averaged) {
        auto ks = stats::ks_test(values, [d](double t) { return analytic::height_cdf_avg(d, t); });
        rep.ks = GfTest{ks.statistic, ks.p_value};
        // the averaged height has no mean; compare the sample median to 1
        std::sort(values.begin(), values.end());
        rep.estimate = values[values.size() / 2];
        rep.analytic = 1.0;
        rep.stderr_ = 2.0 / ((d - 1) * std::sqrt(static_cast<double>(values.size())));
        rep.z_score = (rep.estimate - 1.0) / rep.stderr_;
    } else {
        const double s = s_fixed;
        auto ks = stats::ks_test(values, [s](double t) { return 1.0 - std::exp(-s * t); });
        rep.ks = GfTest{ks.statistic, ks.p_value};
        rep.analytic = 1.0 / s;  // mean of Exp(s)
        finish_moments(rep, values);
    }
    return rep;
}

inline ExperimentReport run_vertex_intensity(const ExperimentConfig& cfg) {
    cell::check_cell_dim(cfg.d);
    const double s = cfg.get("s", 1.0);
    auto rep = base_report(cfg);
    if (cfg.d == 2) {
        const double half = cfg.get("window_A", 100.0);  // interval [-A, A], length 2A
        const double rho0 = cfg.get("rho_min", 0.03);
        const std::uint64_t reps = reps_of(cfg, 200);
        auto rates = run_replications<double>(reps, [&](std::uint64_t i) {
            RngStream rng(cfg.seed, i);
            auto samp = cell::sample_deposition(2, s, half, rho0, false, rng);
            auto env = cell::envelope_2d(samp, -half, half);
            return static_cast<double>(env.vertices.size()) / (2.0 * half);
        });
        rep.analytic = analytic::vertex_rate_2d(s);
        finish_moments(rep, rates);
    } else {
        const double L = cfg.get("window_A", 10.0);  // box [-A, A]^2, area 4A^2
        const double rho0 = cfg.get("rho_min", 0.2);
        const std::uint64_t reps = reps_of(cfg, 20);
        struct Out { double rate; double degenerate; };
        auto outs = run_replications<Out>(reps, [&](std::uint64_t i) -> Out {
            RngStream rng(cfg.seed, i);
            auto samp = cell::sample_deposition(3, s, L, rho0, false, rng);
            auto verts = cell::vertices_3d(samp, L);
            return {static_cast<double>(verts.vertices.size()) / (4.0 * L * L),
                    static_cast<double>(verts.degenerate_skipped)};
        });
        std::vector<double> rates;
        double degenerate = 0.0;
        for (const auto& o : outs) { rates.push_back(o.rate); degenerate += o.degenerate; }
        rep.counters["degenerate_triples_skipped"] = degenerate;
        rep.analytic = analytic::vertex_rate_3d(s, analytic::kNu3Reference);
        finish_moments(rep, rates);
    }
    return rep;
}

struct EnvelopeAccum {
    double hyp_len = 0.0, euc_len = 0.0, area = 0.0;
    double edge_len = 0.0, edge_count = 0.0, vertices = 0.0;
};

inline EnvelopeAccum envelope_rep(int d, double s, double half, double rho0, std::uint64_t seed,
                                  std::uint64_t i) {
    RngStream rng(seed, i);
    auto samp = cell::sample_deposition(d, s, half, rho0, false, rng);
    auto env = cell::envelope_2d(samp, -half, half);
    EnvelopeAccum acc;
    acc.hyp_len = env.hyperbolic_length;
    acc.euc_len = env.total_length;
    acc.area = env.hyperbolic_area_above;
    acc.vertices = static_cast<double>(env.vertices.size());
    for (std::size_t a = 1; a + 1 < env.arcs.size(); ++a) {
        const auto& arc = env.arcs[a];
        const double cc = samp.cx[arc.sphere_index], rr = samp.rho[arc.sphere_index];
        acc.edge_len += std::atanh((arc.x1 - cc) / rr) - std::atanh((arc.x0 - cc) / rr);
        acc.edge_count += 1.0;
    }
    return acc;
}

inline ExperimentReport run_edge_length(const ExperimentConfig& cfg) {
    if (cfg.d != 2) throw std::invalid_argument("config: edge-length requires d = 2");
    const double s = cfg.get("s", 1.0);
    const double half = cfg.get("window_A", 100.0);
    const double rho0 = cfg.get("rho_min", 0.03);
    const std::uint64_t reps = reps_of(cfg, 100);
    auto rep = base_report(cfg);
    auto accs = run_replications<EnvelopeAccum>(reps, [&](std::uint64_t i) {
        return envelope_rep(2, s, half, rho0, cfg.seed, i);
    });
    double len = 0.0, count = 0.0;
    std::vector<double> per_rep;
    for (const auto& a : accs) {
        len += a.edge_len;
        count += a.edge_count;
        if (a.edge_count > 0) per_rep.push_back(a.edge_len / a.edge_count);
    }
    rep.estimate = len / count;
    rep.stderr_ = stats::mean_stderr(per_rep).stderr_;
    rep.analytic = analytic::mean_edge_length_2d();
    if (rep.stderr_ > 0) rep.z_score = (rep.estimate - *rep.analytic) / rep.stderr_;
    rep.counters["edges"] = count;
    return rep;
}

inline ExperimentReport run_length_area(const ExperimentConfig& cfg) {
    if (cfg.d != 2) throw std::invalid_argument("config: length-area requires d = 2");
    const double s = cfg.get("s", 1.0);
    const double half = cfg.get("window_A", 100.0);
    const double rho0 = cfg.get("rho_min", 0.03);
    const std::uint64_t reps = reps_of(cfg, 100);
    auto rep = base_report(cfg);
    auto accs = run_replications<EnvelopeAccum>(reps, [&](std::uint64_t i) {
        return envelope_rep(2, s, half, rho0, cfg.seed, i);
    });
    double len = 0.0, area = 0.0;
    std::vector<double> per_rep;
    for (const auto& a : accs) {
        len += a.hyp_len;
        area += a.area;
        per_rep.push_back(a.hyp_len / a.area);
    }
    rep.estimate = len / area;
    rep.stderr_ = stats::mean_stderr(per_rep).stderr_;
    rep.analytic = analytic::length_area_ratio_2d();
    if (rep.stderr_ > 0) rep.z_score = (rep.estimate - *rep.analytic) / rep.stderr_;
    return rep;
}

inline ExperimentReport run_delays(const ExperimentConfig& cfg) {
    hyp::check_dim(cfg.d);
    const double lambda = cfg.require("lambda");
    if (lambda <= 0.0) throw std::invalid_argument("config: lambda must be positive");
    const std::uint64_t reps = reps_of(cfg, 10000);
    auto rep = base_report(cfg);
    // r_max captures the first point except with probability e^{-25}
    const double r_max =
        hyp::volume_growth_inverse(cfg.d, 25.0 / std::pow(lambda, cfg.d - 1));
    const int d = cfg.d;
    auto firsts = run_replications<double>(reps, [&](std::uint64_t i) {
        RngStream rng(cfg.seed, i);
        auto s = corona::sample_finite_ppp(d, lambda, r_max, rng);
        if (s.points.empty()) return 1e300;  // counted and excluded below
        return corona::empirical_delays(s, lambda)[0];
    });
    std::vector<double> values;
    values.reserve(reps);
    std::uint64_t empty = 0;
    for (double v : firsts) {
        if (v > 1e299) { ++empty; continue; }
        values.push_back(v);
    }
    rep.counters["empty_samples"] = empty;
    auto ks = stats::ks_test(values, [d](double t) { return corona::first_delay_limit_cdf(d, t); });
    rep.ks = GfTest{ks.statistic, ks.p_value};
    rep.estimate = ks.statistic;
    rep.stderr_ = 0.0;
    return rep;
}

inline ExperimentReport run_tree_degree(const ExperimentConfig& cfg) {
    tree::TreeConfig tc;
    tc.k = static_cast<int>(cfg.get("k", 3));
    tc.xi = cfg.get("xi", 1.0);
    tc.ball_radius = 1;
    tc.delay_horizon = 1e9;  // certified per replication below
    tc.validate();
    const std::uint64_t reps = reps_of(cfg, 100000);
    auto rep = base_report(cfg);
    auto degs = run_replications<int>(reps, [&](std::uint64_t i) {
        RngStream rng(cfg.seed, i);
        tree::TreeConfig c = tc;
        auto nuclei = tree::sample_tree_nuclei_auto(c, rng, cfg.seed ^ (i * 0x9E3779B9ULL + 1));
        c.delay_horizon = nuclei.front().delay + 2.0 * c.ball_radius;
        auto asg = tree::assign_cells(c, nuclei);
        return tree::root_degree(asg, c.k);
    });
    std::vector<double> observed(tc.k, 0.0), expected(tc.k, 0.0), values;
    values.reserve(reps);
    for (int deg : degs) {
        observed[deg - 1] += 1.0;
        values.push_back(static_cast<double>(deg));
    }
    double mean_target = 0.0;
    for (int j = 1; j <= tc.k; ++j) {
        expected[j - 1] = reps * analytic::tree_root_degree_pmf(tc.k, j);
        mean_target += j * analytic::tree_root_degree_pmf(tc.k, j);
    }
    auto chi = stats::chi_square(observed, expected);
    rep.ks = GfTest{chi.statistic, chi.p_value};  // goodness-of-fit slot
    rep.analytic = mean_target;
    finish_moments(rep, values);
    for (int j = 1; j <= tc.k; ++j) {
        const double phat = observed[j - 1] / static_cast<double>(reps);
        rep.counters["degree_" + std::to_string(j)] = observed[j - 1];
        rep.counters["pmf_" + std::to_string(j)] = phat;
        rep.counters["pmf_stderr_" + std::to_string(j)] =
            std::sqrt(phat * (1.0 - phat) / static_cast<double>(reps));
    }
    return rep;
}

inline ExperimentReport run_covering(const ExperimentConfig& cfg) {
    cell::check_cell_dim(cfg.d);
    const double s = cfg.get("s", 1.0);
    const double A = cfg.get("window_A", 5.0);
    const double rho0 = cfg.get("rho_min", 0.01);
    const double grid = cfg.get("grid", 0.01);
    const std::uint64_t reps = reps_of(cfg, 100);
    auto rep = base_report(cfg);
    const int d = cfg.d;
    auto fracs = run_replications<double>(reps, [&](std::uint64_t i) {
        RngStream rng(cfg.seed, i);
        auto samp = cell::sample_deposition(d, s, A, rho0, true, rng);
        return cell::covering_check(samp, grid).uncovered_fraction;
    });
    double worst = 0.0;
    std::uint64_t nonzero = 0;
    for (double f : fracs) {
        worst = std::max(worst, f);
        if (f > 0.0) ++nonzero;
    }
    rep.analytic = 0.0;
    finish_moments(rep, fracs);
    rep.z_score.reset();
    rep.counters["replications_with_uncovered_points"] = nonzero;
    rep.counters["max_uncovered_fraction"] = worst;
    rep.counters["per_point_bound"] = std::exp(-s / std::pow(rho0, d - 1));
    return rep;
}

inline ExperimentReport run_isoperimetric(const ExperimentConfig& cfg) {
    auto rep = base_report(cfg);
    rep.estimate = -analytic::hole_prob_derivative_at_zero(cfg.d);
    rep.stderr_ = 0.0;
    rep.analytic = analytic::isoperimetric_constant(cfg.d);
    rep.counters["abs_error"] = std::fabs(rep.estimate - *rep.analytic);
    rep.counters["asymptote"] = analytic::isoperimetric_asymptote(cfg.d);
    return rep;
}

inline ExperimentReport run_nu_d(const ExperimentConfig& cfg) {
    const std::uint64_t n = reps_of(cfg, 10000000);
    auto rep = base_report(cfg);
    // fixed-size chunks on separate streams keep the reduction deterministic
    const std::uint64_t chunk = 1 << 16;
    const std::uint64_t n_chunks = (n + chunk - 1) / chunk;
    struct Acc { double sum = 0.0, sumsq = 0.0; std::uint64_t n = 0; };
    const int d = cfg.d;
    auto accs = run_replications<Acc>(n_chunks, [&](std::uint64_t i) -> Acc {
        RngStream rng(cfg.seed, i);
        const std::uint64_t take = std::min(chunk, n - i * chunk);
        auto est = analytic::nu_d_mc(d, take, rng);
        const double sum = est.estimate * take;
        const double var = est.stderr_ * est.stderr_ * take * (take - 1.0);
        return {sum, var + sum * sum / take, take};
    });
    double sum = 0.0, sumsq = 0.0;
    std::uint64_t total = 0;
    for (const auto& a : accs) { sum += a.sum; sumsq += a.sumsq; total += a.n; }
    rep.estimate = sum / total;
    rep.stderr_ = std::sqrt((sumsq - sum * sum / total) / (total - 1.0) / total);
    rep.analytic = cfg.d == 2 ? analytic::kNu2 : analytic::kNu3Reference;
    rep.z_score = (rep.estimate - *rep.analytic) / rep.stderr_;
    return rep;
}

}  // namespace detail

inline ExperimentReport run(const ExperimentConfig& cfg) {
    validate(cfg);
    const auto start = std::chrono::steady_clock::now();
    ExperimentReport rep;
    if (cfg.experiment == "hole-prob") rep = detail::run_hole_prob(cfg);
    else if (cfg.experiment == "height-angle" || cfg.experiment == "angle" ||
             cfg.experiment == "height-avg")
        rep = detail::run_height_like(cfg);
    else if (cfg.experiment == "vertex-intensity") rep = detail::run_vertex_intensity(cfg);
    else if (cfg.experiment == "edge-length") rep = detail::run_edge_length(cfg);
    else if (cfg.experiment == "length-area") rep = detail::run_length_area(cfg);
    else if (cfg.experiment == "delays") rep = detail::run_delays(cfg);
    else if (cfg.experiment == "tree-degree") rep = detail::run_tree_degree(cfg);
    else if (cfg.experiment == "covering") rep = detail::run_covering(cfg);
    else if (cfg.experiment == "isoperimetric") rep = detail::run_isoperimetric(cfg);
    else if (cfg.experiment == "nu-d") rep = detail::run_nu_d(cfg);
    else throw std::invalid_argument("config: unknown experiment '" + cfg.experiment + "'");
    rep.runtime_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return rep;
}

// flat JSON config: {"experiment": ..., "d": ..., "seed": ..., <params>...}
inline ExperimentConfig config_from_json(const json& j) {
    ExperimentConfig cfg;
    for (auto it = j.begin(); it != j.end(); ++it) {
        const std::string& key = it.key();
        if (key == "experiment") {
            if (!it.value().is_string())
                throw std::invalid_argument("config: experiment must be a string");
            cfg.experiment = it.value().get<std::string>();
        } else if (key == "d") {
            cfg.d = it.value().get<int>();
        } else if (key == "seed") {
            cfg.seed = it.value().get<std::uint64_t>();
            cfg.seed_set = true;
        } else if (it.value().is_number()) {
            cfg.params[key] = it.value().get<double>();
        } else {
            throw std::invalid_argument("config: parameter '" + key + "' must be numeric");
        }
    }
    return cfg;
}

}  // namespace ipv::experiments
