#pragma once

// parallel_for with deterministic results: the index range is split into
// static chunks, each index writes only its own output slot, and any reduction
// happens afterwards in index order on the caller's side.  Consequently the
// number of worker threads never changes a single output bit.

#include <algorithm>
#include <cstdint>
#include <thread>
#include <vector>

namespace qrg {

int default_threads();
void set_default_threads(int threads);

template <class F>
void parallel_for(std::int64_t n, int threads, F&& fn) {
    if (n <= 0) return;
    if (threads <= 1 || n == 1) {
        for (std::int64_t i = 0; i < n; ++i) fn(i);
        return;
    }
    int workers = int(std::min<std::int64_t>(threads, n));
    std::vector<std::thread> pool;
    pool.reserve(workers - 1);
    auto body = [&](int w) {
        // Static block partition: worker w handles [lo, hi).
        std::int64_t lo = n * w / workers;
        std::int64_t hi = n * (w + 1) / workers;
        for (std::int64_t i = lo; i < hi; ++i) fn(i);
    };
    for (int w = 1; w < workers; ++w) pool.emplace_back(body, w);
    body(0);
    for (auto& t : pool) t.join();
}

template <class F>
void parallel_for(std::int64_t n, F&& fn) {
    parallel_for(n, default_threads(), std::forward<F>(fn));
}

} // namespace qrg
