#pragma once

// Deterministic replication runner: replications receive their own RNG
// stream keyed by index, results land in index-order storage, and the
// reduction happens sequentially afterwards, so the outcome is independent
// of thread count and scheduling.

#include <cstdint>
#include <cstdlib>
#include <thread>
#include <vector>

namespace ipv {

inline unsigned worker_count() {
    if (const char* env = std::getenv("IPV_THREADS")) {
        const long v = std::strtol(env, nullptr, 10);
        if (v >= 1) return static_cast<unsigned>(v);
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw ? hw : 1;
}

template <class T, class Fn>
inline std::vector<T> run_replications(std::uint64_t n, const Fn& fn) {
    std::vector<T> results(n);
    const unsigned workers = worker_count();
    if (workers <= 1 || n < 2) {
        for (std::uint64_t i = 0; i < n; ++i) results[i] = fn(i);
        return results;
    }
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned t = 0; t < workers; ++t) {
        pool.emplace_back([&, t] {
            for (std::uint64_t i = t; i < n; i += workers) results[i] = fn(i);
        });
    }
    for (auto& th : pool) th.join();
    return results;
}

}  // namespace ipv
