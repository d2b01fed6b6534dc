#pragma once

// CSV export with fixed schemas: comma separators, header row, '.' decimal
// point, LF line endings, 17 significant digits.

#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "ipv/corona.hpp"
#include "ipv/deposition.hpp"
#include "ipv/envelope.hpp"

namespace ipv::io {

inline std::string format_full(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline std::ofstream open_out(const std::string& path) {
    std::ofstream out(path, std::ios::binary);  // binary keeps LF endings everywhere
    if (!out) throw std::runtime_error("cannot open output file: " + path);
    return out;
}

inline void write_nuclei_csv(const corona::NucleusProcess& proc, const std::string& path) {
    auto out = open_out(path);
    for (int i = 1; i <= proc.d; ++i) out << "theta_" << i << ",";
    out << "R,D\n";
    for (const auto& nu : proc.nuclei) {
        for (double t : nu.theta) out << format_full(t) << ",";
        out << format_full(nu.R) << "," << format_full(nu.D) << "\n";
    }
}

inline void write_spheres_csv(const cell::DepositionSample& sample, const std::string& path) {
    auto out = open_out(path);
    for (int i = 1; i <= sample.d - 1; ++i) out << "center_" << i << ",";
    out << "rho\n";
    for (std::size_t i = 0; i < sample.size(); ++i) {
        out << format_full(sample.cx[i]) << ",";
        if (sample.d == 3) out << format_full(sample.cy[i]) << ",";
        out << format_full(sample.rho[i]) << "\n";
    }
}

inline void write_envelope_csv(const cell::DepositionSample& sample,
                               const cell::Envelope2D& env, double step,
                               const std::string& path) {
    auto out = open_out(path);
    out << "x,H,Theta,sphere_index\n";
    for (const auto& arc : env.arcs) {
        for (double x = arc.x0; x < arc.x1; x += step) {
            const double cc = sample.cx[arc.sphere_index];
            const double rr = sample.rho[arc.sphere_index];
            const double h2 = rr * rr - (x - cc) * (x - cc);
            if (h2 <= 0.0) continue;
            const double h = std::sqrt(h2);
            const double theta = std::acos(std::min(1.0, std::fabs(x - cc) / rr));
            out << format_full(x) << "," << format_full(h) << "," << format_full(theta)
                << "," << arc.sphere_index << "\n";
        }
    }
}

inline void write_vertices_csv(const std::vector<cell::Vertex2D>& vertices,
                               const std::string& path) {
    auto out = open_out(path);
    out << "x,z,sphere_i,sphere_j\n";
    for (const auto& v : vertices)
        out << format_full(v.x) << "," << format_full(v.z) << "," << v.sphere_indices[0]
            << "," << v.sphere_indices[1] << "\n";
}

inline void write_vertices_csv(const std::vector<cell::Vertex3D>& vertices,
                               const std::string& path) {
    auto out = open_out(path);
    out << "x_1,x_2,z,sphere_i,sphere_j,sphere_k\n";
    for (const auto& v : vertices)
        out << format_full(v.base[0]) << "," << format_full(v.base[1]) << ","
            << format_full(v.z) << "," << v.sphere_indices[0] << "," << v.sphere_indices[1]
            << "," << v.sphere_indices[2] << "\n";
}

inline void write_tree_degrees_csv(const std::vector<int>& degrees, const std::string& path) {
    auto out = open_out(path);
    out << "replication,root_degree\n";
    for (std::size_t i = 0; i < degrees.size(); ++i) out << i << "," << degrees[i] << "\n";
}

}  // namespace ipv::io
