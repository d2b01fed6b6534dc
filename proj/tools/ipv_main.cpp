// ipv: experiments and renders for ideal Poisson-Voronoi tessellations of
// hyperbolic space.
//
//   ipv <experiment> [--config cfg.json] [--d 2] [--r 1.0] [--reps 100000]
//                    [--seed 42] [--out report.json] ...
//   ipv render disk|halfplane ...
//   ipv export nuclei|spheres|envelope|vertices|tree ...
//
// Command-line flags override values from --config. Every run requires a
// seed; identical configurations produce byte-identical reports and SVGs
// (runtime_seconds aside).

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "ipv/experiments.hpp"
#include "ipv/io.hpp"
#include "ipv/render.hpp"

using json = nlohmann::json;
using namespace ipv;

namespace {

struct FlagValues {
    std::optional<int> d;
    std::optional<std::uint64_t> seed;
    std::optional<double> r, s, lambda, window_A, rho_min, reps, n_nuclei, k, xi, grid;
    std::string config_path;
    std::string out_path;
};

void add_common_flags(CLI::App* cmd, FlagValues& f) {
    cmd->add_option("--config", f.config_path, "JSON config file; flags override its values");
    cmd->add_option("--d", f.d, "dimension (>= 2)");
    cmd->add_option("--seed", f.seed, "RNG seed (required, here or in the config)");
    cmd->add_option("--r", f.r, "hyperbolic ball radius");
    cmd->add_option("--s", f.s, "conditioning value of the smallest corona radius");
    cmd->add_option("--lambda", f.lambda, "intensity parameter");
    cmd->add_option("--window-A", f.window_A, "half-width A of the window [-A, A]^{d-1}");
    cmd->add_option("--rho-min", f.rho_min, "small-radius truncation");
    cmd->add_option("--reps", f.reps, "number of replications / samples");
    cmd->add_option("--n-nuclei", f.n_nuclei, "number of ideal nuclei");
    cmd->add_option("--k", f.k, "tree degree");
    cmd->add_option("--xi", f.xi, "tree intensity parameter in [1, k-1)");
    cmd->add_option("--grid", f.grid, "grid step (covering) or resolution (render)");
    cmd->add_option("--out", f.out_path, "output path");
}

experiments::ExperimentConfig build_config(const std::string& experiment, const FlagValues& f) {
    experiments::ExperimentConfig cfg;
    if (!f.config_path.empty()) {
        std::ifstream in(f.config_path);
        if (!in) throw std::invalid_argument("config: cannot open file " + f.config_path);
        json j = json::parse(in);
        cfg = experiments::config_from_json(j);
    }
    cfg.experiment = experiment;
    if (f.d) cfg.d = *f.d;
    if (f.seed) { cfg.seed = *f.seed; cfg.seed_set = true; }
    auto set = [&](const char* key, const std::optional<double>& v) {
        if (v) cfg.params[key] = *v;
    };
    set("r", f.r);
    set("s", f.s);
    set("lambda", f.lambda);
    set("window_A", f.window_A);
    set("rho_min", f.rho_min);
    set("reps", f.reps);
    set("k", f.k);
    set("xi", f.xi);
    set("grid", f.grid);
    return cfg;
}

int run_experiment(const std::string& name, const FlagValues& f) {
    auto cfg = build_config(name, f);
    auto report = experiments::run(cfg);
    json j = experiments::to_json(report);
    const std::string text = j.dump(2) + "\n";
    if (!f.out_path.empty()) {
        std::ofstream out(f.out_path, std::ios::binary);
        if (!out) throw std::runtime_error("cannot open output file: " + f.out_path);
        out << text;
    }
    std::cout << text;
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"ideal Poisson-Voronoi tessellations of hyperbolic space"};
    app.require_subcommand(1);

    std::map<std::string, FlagValues> flag_store;
    for (const auto& name : experiments::known_experiments()) {
        auto* cmd = app.add_subcommand(name, "run the '" + name + "' experiment");
        add_common_flags(cmd, flag_store[name]);
    }

    FlagValues render_flags;
    bool no_corona = false, no_adjacency = false, constrained = false;
    auto* render_cmd = app.add_subcommand("render", "render an SVG");
    auto* disk = render_cmd->add_subcommand("disk", "tessellation in the unit disk");
    add_common_flags(disk, render_flags);
    disk->add_flag("--no-corona", no_corona, "omit the corona annulus overlay");
    disk->add_flag("--no-adjacency", no_adjacency, "omit adjacency chords");
    auto* halfplane = render_cmd->add_subcommand("halfplane", "origin cell in the half-space");
    add_common_flags(halfplane, render_flags);
    halfplane->add_flag("--constrained", constrained,
                        "use the deposition model instead of the stationary one");

    FlagValues export_flags;
    bool export_constrained = false;
    auto* export_cmd = app.add_subcommand("export", "write samples as CSV");
    auto* exp_nuclei = export_cmd->add_subcommand("nuclei", "corona nuclei CSV");
    auto* exp_spheres = export_cmd->add_subcommand("spheres", "half-sphere cloud CSV");
    auto* exp_envelope = export_cmd->add_subcommand("envelope", "envelope profile CSV (d=2)");
    auto* exp_vertices = export_cmd->add_subcommand("vertices", "envelope vertices CSV");
    auto* exp_tree = export_cmd->add_subcommand("tree", "tree root degrees CSV");
    for (auto* c : {exp_nuclei, exp_spheres, exp_envelope, exp_vertices, exp_tree})
        add_common_flags(c, export_flags);
    for (auto* c : {exp_spheres, exp_envelope, exp_vertices})
        c->add_flag("--constrained", export_constrained, "use the deposition model");

    CLI11_PARSE(app, argc, argv);

    try {
        for (const auto& name : experiments::known_experiments())
            if (app.get_subcommand(name)->parsed()) return run_experiment(name, flag_store[name]);

        if (render_cmd->parsed()) {
            const auto& f = render_flags;
            if (!f.seed) throw std::invalid_argument("config: missing required parameter 'seed'");
            if (f.out_path.empty()) throw std::invalid_argument("config: missing --out path");
            if (disk->parsed()) {
                const int d = f.d.value_or(2);
                if (d != 2) throw std::invalid_argument("config: render disk requires d = 2");
                RngStream rng(*f.seed, 0);
                auto proc = corona::sample_nuclei(
                    2, static_cast<std::size_t>(f.n_nuclei.value_or(200)), rng, *f.seed, 0);
                render::DiskOptions opt;
                opt.show_corona = !no_corona;
                opt.show_adjacency = !no_adjacency;
                auto info = render::render_disk(
                    proc, static_cast<int>(f.grid.value_or(400)), f.out_path, opt);
                std::fprintf(stderr, "wrote %s (%llu pixels, %llu truncation-unsafe)\n",
                             f.out_path.c_str(),
                             static_cast<unsigned long long>(info.pixels),
                             static_cast<unsigned long long>(info.truncation_unsafe_pixels));
            } else if (halfplane->parsed()) {
                const int d = f.d.value_or(2);
                RngStream rng(*f.seed, 0);
                auto samp = cell::sample_deposition(d, f.s.value_or(1.0),
                                                    f.window_A.value_or(d == 2 ? 3.0 : 1.5),
                                                    f.rho_min.value_or(0.02), constrained, rng);
                render::render_halfplane(samp, f.out_path);
                std::fprintf(stderr, "wrote %s (%zu spheres)\n", f.out_path.c_str(), samp.size());
            } else {
                throw std::invalid_argument("config: render needs a mode (disk or halfplane)");
            }
            return 0;
        }

        if (export_cmd->parsed()) {
            const auto& f = export_flags;
            if (!f.seed) throw std::invalid_argument("config: missing required parameter 'seed'");
            if (f.out_path.empty()) throw std::invalid_argument("config: missing --out path");
            RngStream rng(*f.seed, 0);
            const int d = f.d.value_or(2);
            if (exp_nuclei->parsed()) {
                auto proc = corona::sample_nuclei(
                    d, static_cast<std::size_t>(f.n_nuclei.value_or(100)), rng, *f.seed, 0);
                io::write_nuclei_csv(proc, f.out_path);
            } else if (exp_spheres->parsed() || exp_envelope->parsed() || exp_vertices->parsed()) {
                auto samp = cell::sample_deposition(d, f.s.value_or(1.0),
                                                    f.window_A.value_or(d == 2 ? 5.0 : 2.0),
                                                    f.rho_min.value_or(0.03), export_constrained,
                                                    rng);
                if (exp_spheres->parsed()) {
                    io::write_spheres_csv(samp, f.out_path);
                } else if (exp_envelope->parsed()) {
                    if (d != 2) throw std::invalid_argument("config: envelope export requires d = 2");
                    auto env = cell::envelope_2d(samp, -samp.window_A, samp.window_A);
                    io::write_envelope_csv(samp, env, f.grid.value_or(0.01), f.out_path);
                } else if (d == 2) {
                    auto env = cell::envelope_2d(samp, -samp.window_A, samp.window_A);
                    io::write_vertices_csv(env.vertices, f.out_path);
                } else {
                    auto verts = cell::vertices_3d(samp, samp.window_A);
                    io::write_vertices_csv(verts.vertices, f.out_path);
                }
            } else if (exp_tree->parsed()) {
                tree::TreeConfig tc;
                tc.k = static_cast<int>(f.k.value_or(3));
                tc.xi = f.xi.value_or(1.0);
                tc.ball_radius = 1;
                tc.delay_horizon = 1e9;
                const auto reps = static_cast<std::size_t>(f.reps.value_or(1000));
                std::vector<int> degrees(reps);
                for (std::size_t i = 0; i < reps; ++i) {
                    RngStream rr(*f.seed, i);
                    tree::TreeConfig c = tc;
                    auto nuclei = tree::sample_tree_nuclei_auto(c, rr, *f.seed ^ (i + 1));
                    c.delay_horizon = nuclei.front().delay + 2.0 * c.ball_radius;
                    degrees[i] = tree::root_degree(tree::assign_cells(c, nuclei), c.k);
                }
                io::write_tree_degrees_csv(degrees, f.out_path);
            } else {
                throw std::invalid_argument("config: export needs a mode");
            }
            return 0;
        }
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
