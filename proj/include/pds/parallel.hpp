#pragma once
// ============================================================================
// Tiny block-parallel loop. Deterministic partitioning: results must never
// depend on thread count, so callers write to disjoint slots and merge in
// index order themselves.
// ============================================================================

#include <algorithm>
#include <cstddef>
#include <functional>
#include <thread>
#include <vector>

namespace pds {

// Global default used when threads == 0 is passed; set once from the CLI.
int& default_thread_count();

// Runs fn(i) for i in [0, n) across `threads` workers in contiguous blocks.
inline void parallel_for(size_t n, const std::function<void(size_t)>& fn, int threads = 0) {
    if (threads <= 0) threads = default_thread_count();
    threads = std::max(1, std::min<int>(threads, static_cast<int>(n ? n : 1)));
    if (threads == 1 || n < 2) {
        for (size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::vector<std::thread> pool;
    size_t chunk = (n + threads - 1) / threads;
    for (int t = 0; t < threads; ++t) {
        size_t lo = t * chunk, hi = std::min(n, lo + chunk);
        if (lo >= hi) break;
        pool.emplace_back([lo, hi, &fn] {
            for (size_t i = lo; i < hi; ++i) fn(i);
        });
    }
    for (auto& th : pool) th.join();
}

}  // namespace pds
