#pragma once

#include <algorithm>
#include <functional>
#include <thread>
#include <vector>

namespace plap {

inline int resolve_threads(int requested) {
    if (requested > 0) return requested;
    const unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? static_cast<int>(std::min(hw, 8u)) : 1;
}

/// Runs fn(begin, end) over a partition of [0, n).  Intended for loops whose
/// per-index results are pure functions of the index, so the partition (and
/// the worker count) cannot change the output.
inline void parallel_for(long n, int threads, const std::function<void(long, long)>& fn) {
    threads = static_cast<int>(std::max<long>(1, std::min<long>(threads, n)));
    if (threads <= 1 || n < 1024) {
        if (n > 0) fn(0, n);
        return;
    }
    std::vector<std::thread> pool;
    const long chunk = (n + threads - 1) / threads;
    for (int t = 0; t < threads; ++t) {
        const long lo = t * chunk;
        const long hi = std::min(n, lo + chunk);
        if (lo >= hi) break;
        pool.emplace_back(fn, lo, hi);
    }
    for (auto& th : pool) th.join();
}

}  // namespace plap
