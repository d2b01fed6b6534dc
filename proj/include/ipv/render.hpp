#pragma once

// Renderers: the ideal tessellation in the disk (pixel grid colored by
// cell, optional corona overlay and adjacency chords) and the origin cell
// in the upper half-plane (arcs, envelope, vertices; heightmap for d=3).

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "ipv/corona.hpp"
#include "ipv/deposition.hpp"
#include "ipv/envelope.hpp"
#include "ipv/svg.hpp"

namespace ipv::render {

struct DiskOptions {
    bool show_corona = true;     // nuclei marks on an outer annulus
    bool show_adjacency = true;  // chords between nuclei of adjacent cells
};

struct DiskRenderInfo {
    std::uint64_t pixels = 0;
    std::uint64_t truncation_unsafe_pixels = 0;
    std::uint64_t adjacent_pairs = 0;
};

inline DiskRenderInfo render_disk(const corona::NucleusProcess& proc, int resolution,
                                  const std::string& out_path, DiskOptions opt = {}) {
    if (proc.d != 2) throw std::invalid_argument("render_disk: requires d = 2");
    if (proc.nuclei.empty()) throw std::invalid_argument("render_disk: empty process");
    if (resolution < 8) throw std::invalid_argument("render_disk: resolution too small");

    // corona radii scaled linearly onto the annulus [1.02, 2.02]
    double r_min = proc.nuclei.front().R, r_max = proc.nuclei.back().R;
    const double annulus_lo = 1.02, annulus_hi = 2.02;
    auto annulus_r = [&](double R) {
        if (r_max == r_min) return 0.5 * (annulus_lo + annulus_hi);
        return annulus_lo + (R - r_min) / (r_max - r_min) * (annulus_hi - annulus_lo);
    };
    const double extent = opt.show_corona ? annulus_hi + 0.08 : 1.05;
    svg::Writer w(-extent, -extent, 2 * extent, 2 * extent, 900);
    w.rect(-extent, -extent, 2 * extent, 2 * extent, "#ffffff");

    DiskRenderInfo info;
    const double px = 2.0 / resolution;
    std::vector<std::int32_t> row(resolution);
    std::vector<std::int32_t> prev_row(resolution, -1);
    std::set<std::pair<std::int32_t, std::int32_t>> adjacent;
    std::string cells_body;
    for (int j = 0; j < resolution; ++j) {
        const double y = -1.0 + (j + 0.5) * px;
        for (int i = 0; i < resolution; ++i) {
            const double x = -1.0 + (i + 0.5) * px;
            if (x * x + y * y >= 0.9999) {
                row[i] = -1;
                continue;
            }
            const hyp::Vec z{x, y};
            auto sf = corona::separation_field(z, proc);
            if (sf.truncation_unsafe) info.truncation_unsafe_pixels++;
            info.pixels++;
            row[i] = static_cast<std::int32_t>(sf.argmin_index);
            if (opt.show_adjacency) {
                if (i > 0 && row[i - 1] > 0 && row[i - 1] != row[i])
                    adjacent.insert({std::min(row[i - 1], row[i]), std::max(row[i - 1], row[i])});
                if (prev_row[i] > 0 && prev_row[i] != row[i])
                    adjacent.insert({std::min(prev_row[i], row[i]), std::max(prev_row[i], row[i])});
            }
        }
        // run-length encode the row into rects
        int i = 0;
        while (i < resolution) {
            if (row[i] < 0) { ++i; continue; }
            int k = i;
            while (k + 1 < resolution && row[k + 1] == row[i]) ++k;
            cells_body += "<rect x=\"" + svg::num(-1.0 + i * px) + "\" y=\"" +
                          svg::num(-1.0 + j * px) + "\" width=\"" + svg::num((k - i + 1) * px) +
                          "\" height=\"" + svg::num(px) + "\" fill=\"" +
                          svg::palette(static_cast<std::size_t>(row[i] - 1)) + "\"/>\n";
            i = k + 1;
        }
        std::swap(row, prev_row);
    }
    w.raw(cells_body);
    w.circle(0.0, 0.0, 1.0, "fill=\"none\" stroke=\"#000000\" stroke-width=\"0.006\"");

    if (opt.show_adjacency) {
        info.adjacent_pairs = adjacent.size();
        for (const auto& [a, b] : adjacent) {
            const auto& ta = proc.nuclei[a - 1].theta;
            const auto& tb = proc.nuclei[b - 1].theta;
            w.line(ta[0], ta[1], tb[0], tb[1],
                   "stroke=\"#9ecae9\" stroke-width=\"0.004\" opacity=\"0.8\"");
        }
    }
    if (opt.show_corona) {
        for (const auto& nu : proc.nuclei) {
            const double rr = annulus_r(nu.R);
            w.line(nu.theta[0], nu.theta[1], rr * nu.theta[0], rr * nu.theta[1],
                   "stroke=\"#cccccc\" stroke-width=\"0.002\"");
            w.circle(rr * nu.theta[0], rr * nu.theta[1], 0.012,
                     "fill=\"#333333\" stroke=\"none\"");
        }
    }

    std::ofstream out(out_path, std::ios::binary);
    if (!out) throw std::runtime_error("render_disk: cannot open " + out_path);
    out << w.finish();
    return info;
}

inline void render_halfplane(const cell::DepositionSample& sample, const std::string& out_path) {
    const double A = sample.window_A;
    std::ofstream out(out_path, std::ios::binary);
    if (!out) throw std::runtime_error("render_halfplane: cannot open " + out_path);

    if (sample.d == 2) {
        const double top = std::max(2.0, 1.2);
        svg::Writer w(-A, -top, 2 * A, top + 0.1, 1200);
        w.rect(-A, -top, 2 * A, top + 0.1, "#ffffff");
        // SVG y axis points down; flip z
        auto arc_path = [&](double c, double rho, double x0, double x1) {
            const double z0 = std::sqrt(std::max(0.0, rho * rho - (x0 - c) * (x0 - c)));
            const double z1 = std::sqrt(std::max(0.0, rho * rho - (x1 - c) * (x1 - c)));
            return "M " + svg::num(x0) + " " + svg::num(-z0) + " A " + svg::num(rho) + " " +
                   svg::num(rho) + " 0 0 1 " + svg::num(x1) + " " + svg::num(-z1);
        };
        for (std::size_t i = 0; i < sample.size(); ++i) {
            const double c = sample.cx[i], rho = sample.rho[i];
            const double x0 = std::max(c - rho, -A), x1 = std::min(c + rho, A);
            if (x0 >= x1) continue;
            w.path(arc_path(c, rho, x0, x1),
                   "fill=\"none\" stroke=\"#b8cbe4\" stroke-width=\"0.004\"");
        }
        bool have_env = false;
        cell::Envelope2D env;
        try {
            env = cell::envelope_2d(sample, -A, A);
            have_env = true;
        } catch (const std::exception&) {
            // empty or partially covered sample: render arcs only
        }
        if (have_env && !env.arcs.empty()) {
            std::string shade = "M " + svg::num(-A) + " " + svg::num(-top);
            std::string stroke;
            for (const auto& a : env.arcs) {
                const double c = sample.cx[a.sphere_index], rho = sample.rho[a.sphere_index];
                const double z0 = std::sqrt(std::max(0.0, rho * rho - (a.x0 - c) * (a.x0 - c)));
                const double z1 = std::sqrt(std::max(0.0, rho * rho - (a.x1 - c) * (a.x1 - c)));
                shade += " L " + svg::num(a.x0) + " " + svg::num(-z0);
                shade += " A " + svg::num(rho) + " " + svg::num(rho) + " 0 0 1 " +
                         svg::num(a.x1) + " " + svg::num(-z1);
                stroke += (stroke.empty() ? "M " : " M ") + svg::num(a.x0) + " " + svg::num(-z0) +
                          " A " + svg::num(rho) + " " + svg::num(rho) + " 0 0 1 " +
                          svg::num(a.x1) + " " + svg::num(-z1);
            }
            shade += " L " + svg::num(A) + " " + svg::num(-top) + " Z";
            w.path(shade, "fill=\"#dce9f6\" stroke=\"none\" opacity=\"0.9\"");
            w.path(stroke, "fill=\"none\" stroke=\"#1d4f91\" stroke-width=\"0.008\"");
            for (const auto& v : env.vertices)
                w.circle(v.x, -v.z, 0.012, "fill=\"#e15759\" stroke=\"none\"");
        }
        w.line(-A, 0.0, A, 0.0, "stroke=\"#000000\" stroke-width=\"0.004\"");
        out << w.finish();
        return;
    }

    // d = 3: grayscale heightmap of the envelope over the window; dominated
    // spheres cannot surface, so drop them before the grid scan
    cell::DepositionSample top;
    top.d = 3;
    top.window_A = sample.window_A;
    top.rho_min = sample.rho_min;
    top.constrained = sample.constrained;
    for (std::size_t idx : cell::filter_dominated_3d(sample.cx, sample.cy, sample.rho)) {
        top.cx.push_back(sample.cx[idx]);
        top.cy.push_back(sample.cy[idx]);
        top.rho.push_back(sample.rho[idx]);
    }
    const int grid = 240;
    svg::Writer w(0, 0, grid, grid, 960);
    const double step = 2.0 * A / grid;
    for (int j = 0; j < grid; ++j) {
        for (int i = 0; i < grid; ++i) {
            const std::vector<double> x0{-A + (i + 0.5) * step, -A + (j + 0.5) * step};
            auto pt = cell::height_angle_at(x0, top);
            std::string fill = "#000000";
            if (pt) {
                const double h = std::min(pt->H, 3.0) / 3.0;
                const int g = static_cast<int>(std::lround(32 + 223 * h));
                char buf[8];
                std::snprintf(buf, sizeof buf, "#%02x%02x%02x", g, g, g);
                fill = buf;
            }
            w.rect(i, grid - 1 - j, 1.0, 1.0, fill);
        }
    }
    out << w.finish();
}

}  // namespace ipv::render
