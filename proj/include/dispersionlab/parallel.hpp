#pragma once

#include <algorithm>
#include <cstdlib>
#include <cstddef>
#include <thread>
#include <vector>

namespace dispersionlab {

// Thread cap: DISPERSIONLAB_THREADS if set, else hardware concurrency.
inline unsigned thread_limit() {
    if (const char* env = std::getenv("DISPERSIONLAB_THREADS")) {
        long v = std::atol(env);
        if (v >= 1) return unsigned(v);
    }
    unsigned hw = std::thread::hardware_concurrency();
    return hw ? hw : 1;
}

// Deterministic parallel map: each index is computed independently, so the
// result does not depend on the thread count.
template <class F>
void parallel_for(std::size_t n, const F& body) {
    const unsigned threads = std::min<std::size_t>(thread_limit(), n ? n : 1);
    if (threads <= 1 || n < 64) {
        for (std::size_t i = 0; i < n; ++i) body(i);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(threads);
    const std::size_t chunk = (n + threads - 1) / threads;
    for (unsigned t = 0; t < threads; ++t) {
        const std::size_t lo = t * chunk, hi = std::min(n, lo + chunk);
        if (lo >= hi) break;
        pool.emplace_back([&, lo, hi] {
            for (std::size_t i = lo; i < hi; ++i) body(i);
        });
    }
    for (auto& th : pool) th.join();
}

}  // namespace dispersionlab
