#pragma once

#include <cstdint>
#include <cstdlib>
#include <functional>
#include <thread>
#include <vector>

namespace gwmaxdeg {

// Thread budget: min(GWMAXDEG_THREADS, hardware), at least 1.
inline unsigned thread_budget() {
    unsigned hw = std::thread::hardware_concurrency();
    if (hw == 0) hw = 1;
    if (const char* env = std::getenv("GWMAXDEG_THREADS")) {
        char* end = nullptr;
        long v = std::strtol(env, &end, 10);
        if (end != env && v >= 1 && static_cast<unsigned>(v) < hw) return static_cast<unsigned>(v);
        if (end != env && v >= 1) return static_cast<unsigned>(v) <= hw ? static_cast<unsigned>(v) : hw;
    }
    return hw;
}

// Static-chunk parallel loop over [0, n). Results must be written to disjoint
// slots so the outcome is independent of the thread count.
inline void parallel_for(std::int64_t n, const std::function<void(std::int64_t, std::int64_t)>& chunk_fn) {
    if (n <= 0) return;
    const unsigned threads = thread_budget();
    if (threads <= 1 || n < 2) {
        chunk_fn(0, n);
        return;
    }
    const std::int64_t t = std::min<std::int64_t>(threads, n);
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(t));
    for (std::int64_t i = 0; i < t; ++i) {
        const std::int64_t lo = n * i / t;
        const std::int64_t hi = n * (i + 1) / t;
        pool.emplace_back([&chunk_fn, lo, hi] { chunk_fn(lo, hi); });
    }
    for (auto& th : pool) th.join();
}

}  // namespace gwmaxdeg
