#pragma once

#include <cstdlib>
#include <functional>
#include <thread>
#include <vector>

namespace ppife {

/// Worker count: PPIFE_THREADS caps it, hardware concurrency is the default.
inline int worker_count() {
    int hw = static_cast<int>(std::thread::hardware_concurrency());
    if (hw <= 0) hw = 1;
    if (const char* env = std::getenv("PPIFE_THREADS")) {
        int cap = std::atoi(env);
        if (cap >= 1 && cap < hw) hw = cap;
    }
    return hw;
}

/// Runs fn(i) for i in [0, n). Each index writes only its own output slot,
/// so the result is independent of the thread count.
template <typename Fn>
void parallel_for(int n, Fn&& fn) {
    const int workers = std::min(worker_count(), n > 0 ? n : 1);
    if (workers <= 1 || n < 64) {
        for (int i = 0; i < n; ++i) fn(i);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(workers - 1);
    const int chunk = (n + workers - 1) / workers;
    for (int w = 1; w < workers; ++w) {
        const int lo = w * chunk, hi = std::min(n, lo + chunk);
        if (lo >= hi) break;
        pool.emplace_back([=]() {
            for (int i = lo; i < hi; ++i) fn(i);
        });
    }
    for (int i = 0; i < std::min(chunk, n); ++i) fn(i);
    for (std::thread& t : pool) t.join();
}

}  // namespace ppife
