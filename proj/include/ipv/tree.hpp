#pragma once

// Ideal tessellation on the k-regular tree: nuclei are uniform boundary
// rays carrying delays from a Poisson process with intensity xi (k-1)^m on
// [m, m+1), and a vertex v joins the cell minimizing delay + horofunction,
// where the tree horofunction is depth(v) - 2 * (shared prefix with the ray).

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <vector>

#include "ipv/rng.hpp"

namespace ipv::tree {

// Non-backtracking word from the root: first label in [0,k), later labels
// in [0,k-1) indexing the forward edges.
using Word = std::vector<int>;

struct TreeNucleus {
    double delay = 0.0;
    std::uint64_t ray_seed = 0;
    std::uint64_t ray_stream = 0;
    mutable Word ray_prefix;  // lazily extended

    void ensure_depth(std::size_t depth, int k) const {
        if (ray_prefix.size() >= depth) return;
        RngStream rng(ray_seed, ray_stream);
        // replay deterministically from the start
        Word fresh;
        fresh.reserve(depth);
        fresh.push_back(static_cast<int>(rng.uniform_int(static_cast<std::uint64_t>(k))));
        while (fresh.size() < depth)
            fresh.push_back(static_cast<int>(rng.uniform_int(static_cast<std::uint64_t>(k - 1))));
        ray_prefix = std::move(fresh);
    }
};

struct TreeConfig {
    int k = 3;
    double xi = 1.0;            // in [1, k-1)
    double delay_horizon = 4.0; // nuclei sampled on (-inf, horizon]
    int ball_radius = 1;

    void validate() const {
        if (k < 3) throw std::domain_error("TreeConfig: k must be >= 3");
        if (!(xi >= 1.0 && xi < k - 1)) throw std::domain_error("TreeConfig: xi must lie in [1, k-1)");
        if (ball_radius < 1) throw std::domain_error("TreeConfig: ball_radius must be >= 1");
    }
};

// Bands of constant intensity xi (k-1)^m, m from m_min up to the horizon.
// The mass below m_min is xi (k-1)^{m_min-1} (k-1)/(k-2); m_min is chosen
// so that it stays under 1e-12.
inline std::vector<TreeNucleus> sample_tree_nuclei(const TreeConfig& cfg, RngStream& rng,
                                                   std::uint64_t ray_seed = 0,
                                                   std::uint64_t ray_stream_base = 0) {
    cfg.validate();
    const double logk1 = std::log(static_cast<double>(cfg.k - 1));
    int m_min = static_cast<int>(std::floor(
        (std::log(1e-12 * (cfg.k - 2) / cfg.xi) / logk1)));
    m_min = std::min(m_min, -1);
    std::vector<TreeNucleus> nuclei;
    std::uint64_t counter = ray_stream_base;
    for (int m = m_min; m < static_cast<int>(std::ceil(cfg.delay_horizon)); ++m) {
        const double band_hi = std::min(static_cast<double>(m) + 1.0, cfg.delay_horizon);
        const double band_lo = static_cast<double>(m);
        const double mass = cfg.xi * std::exp(m * logk1) * (band_hi - band_lo);
        const std::uint64_t n = rng.poisson(mass);
        for (std::uint64_t i = 0; i < n; ++i) {
            TreeNucleus nu;
            nu.delay = band_lo + rng.u01() * (band_hi - band_lo);
            nu.ray_seed = ray_seed;
            nu.ray_stream = counter++;
            nuclei.push_back(std::move(nu));
        }
    }
    std::sort(nuclei.begin(), nuclei.end(),
              [](const TreeNucleus& a, const TreeNucleus& b) { return a.delay < b.delay; });
    if (nuclei.empty())
        throw std::runtime_error("sample_tree_nuclei: no nucleus below the horizon");
    if (cfg.delay_horizon < nuclei.front().delay + 2.0 * cfg.ball_radius)
        throw std::runtime_error(
            "sample_tree_nuclei: horizon too small to certify assignments in the ball");
    return nuclei;
}

// Samples bands upward until the horizon is certified (min delay + 2R).
inline std::vector<TreeNucleus> sample_tree_nuclei_auto(TreeConfig cfg, RngStream& rng,
                                                        std::uint64_t ray_seed = 0) {
    cfg.validate();
    const double logk1 = std::log(static_cast<double>(cfg.k - 1));
    int m_min = static_cast<int>(std::floor(std::log(1e-12 * (cfg.k - 2) / cfg.xi) / logk1));
    m_min = std::min(m_min, -1);
    std::vector<TreeNucleus> nuclei;
    std::uint64_t counter = 0;
    double dmin = 0.0;
    bool have = false;
    for (int m = m_min;; ++m) {
        const double mass = cfg.xi * std::exp(m * logk1);
        const std::uint64_t n = rng.poisson(mass);
        for (std::uint64_t i = 0; i < n; ++i) {
            TreeNucleus nu;
            nu.delay = m + rng.u01();
            nu.ray_seed = ray_seed;
            nu.ray_stream = counter++;
            if (!have || nu.delay < dmin) { dmin = nu.delay; have = true; }
            nuclei.push_back(std::move(nu));
        }
        if (have && m + 1 >= dmin + 2.0 * cfg.ball_radius) break;
    }
    std::sort(nuclei.begin(), nuclei.end(),
              [](const TreeNucleus& a, const TreeNucleus& b) { return a.delay < b.delay; });
    return nuclei;
}

// h_theta(v) = |v| - 2 * (length of the common prefix of v and the ray)
inline int tree_horofunction(const Word& v, const TreeNucleus& nucleus, int k) {
    nucleus.ensure_depth(v.size(), k);
    std::size_t shared = 0;
    while (shared < v.size() && nucleus.ray_prefix[shared] == v[shared]) ++shared;
    return static_cast<int>(v.size()) - 2 * static_cast<int>(shared);
}

// breadth-first words of the ball B_R (root first)
inline std::vector<Word> ball_words(int k, int R) {
    std::vector<Word> words;
    words.push_back({});
    std::size_t level_begin = 0;
    for (int depth = 0; depth < R; ++depth) {
        const std::size_t level_end = words.size();
        for (std::size_t i = level_begin; i < level_end; ++i) {
            const int fanout = words[i].empty() ? k : k - 1;
            for (int c = 0; c < fanout; ++c) {
                Word w = words[i];
                w.push_back(c);
                words.push_back(std::move(w));
            }
        }
        level_begin = level_end;
    }
    return words;
}

struct Assignment {
    std::vector<Word> words;          // ball B_R in BFS order
    std::vector<std::size_t> cell;    // nucleus index per word
};

// Cells over B_R; only nuclei with delay <= delay_min + 2R can win anywhere
// in the ball (|h| <= R), so the candidate set is provably sufficient.
inline Assignment assign_cells(const TreeConfig& cfg, const std::vector<TreeNucleus>& nuclei,
                               bool restrict_candidates = true) {
    cfg.validate();
    if (nuclei.empty()) throw std::invalid_argument("assign_cells: no nuclei");
    const double dmin = nuclei.front().delay;
    if (cfg.delay_horizon < dmin + 2.0 * cfg.ball_radius)
        throw std::runtime_error("assign_cells: horizon not certified for this ball");
    std::size_t n_cand = nuclei.size();
    if (restrict_candidates) {
        n_cand = 0;
        while (n_cand < nuclei.size() &&
               nuclei[n_cand].delay <= dmin + 2.0 * cfg.ball_radius)
            ++n_cand;
    }
    Assignment out;
    out.words = ball_words(cfg.k, cfg.ball_radius);
    out.cell.resize(out.words.size());
    for (std::size_t w = 0; w < out.words.size(); ++w) {
        double best = std::numeric_limits<double>::infinity();
        std::size_t who = 0;
        for (std::size_t i = 0; i < n_cand; ++i) {
            const double val = nuclei[i].delay +
                               tree_horofunction(out.words[w], nuclei[i], cfg.k);
            if (val < best) { best = val; who = i; }
        }
        out.cell[w] = who;
    }
    return out;
}

// number of root-neighbors sharing the root's cell, in [1, k]
inline int root_degree(const Assignment& assignment, int k) {
    if (assignment.words.size() < static_cast<std::size_t>(k) + 1)
        throw std::invalid_argument("root_degree: assignment must cover B_1");
    int deg = 0;
    for (int j = 1; j <= k; ++j)
        if (assignment.cell[j] == assignment.cell[0]) ++deg;
    return deg;
}

// per-cell connectivity inside the ball: a cell meets B_R in a subtree iff
// it has exactly one member whose parent lies outside the cell (the root
// counting as having no parent)
inline bool cells_connected(const Assignment& assignment, int k) {
    const std::size_t n = assignment.words.size();
    std::vector<std::size_t> parent(n, 0);
    std::size_t next_child = 1;
    for (std::size_t i = 0; i < n && next_child < n; ++i) {
        const int fanout = assignment.words[i].empty() ? k : k - 1;
        for (int c = 0; c < fanout && next_child < n; ++c) parent[next_child++] = i;
    }
    std::vector<int> heads, members;
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t c = assignment.cell[i];
        if (c >= heads.size()) { heads.resize(c + 1, 0); members.resize(c + 1, 0); }
        members[c]++;
        if (i == 0 || assignment.cell[parent[i]] != c) heads[c]++;
    }
    for (std::size_t c = 0; c < heads.size(); ++c)
        if (members[c] > 0 && heads[c] != 1) return false;
    return true;
}

}  // namespace ipv::tree
