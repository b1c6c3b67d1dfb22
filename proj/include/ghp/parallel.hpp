#pragma once

#include <algorithm>
#include <cstddef>
#include <functional>
#include <thread>
#include <vector>

namespace ghp {

/// Runs fn(begin, end) over [0, n) split into contiguous chunks, one per
/// worker. Chunk boundaries depend only on (n, workers), so any result
/// written to disjoint slots is identical for every worker count.
inline void parallel_for(std::size_t n, int workers, const std::function<void(std::size_t, std::size_t)>& fn) {
    if (n == 0) return;
    int w = std::max(1, workers);
    if (static_cast<std::size_t>(w) > n) w = static_cast<int>(n);
    if (w == 1) {
        fn(0, n);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(w);
    const std::size_t chunk = (n + w - 1) / w;
    for (int k = 0; k < w; ++k) {
        const std::size_t lo = k * chunk;
        const std::size_t hi = std::min(n, lo + chunk);
        if (lo >= hi) break;
        pool.emplace_back(fn, lo, hi);
    }
    for (auto& th : pool) th.join();
}

/// Default worker count: hardware concurrency, overridable by the caller.
inline int default_workers() {
    unsigned hc = std::thread::hardware_concurrency();
    return hc == 0 ? 1 : static_cast<int>(hc);
}

} // namespace ghp
