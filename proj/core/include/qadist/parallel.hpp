#pragma once

#include <cstddef>
#include <thread>
#include <vector>

namespace qadist {

// Runs fn(i) for i in [0, count) across at most `threads` workers with a
// static block partition. Results must be written to pre-sized slots so the
// merge order stays deterministic.
template <typename Fn>
void parallel_for(size_t count, int threads, Fn&& fn) {
    if (threads <= 1 || count <= 1) {
        for (size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    const size_t n_workers = std::min(static_cast<size_t>(threads), count);
    std::vector<std::thread> workers;
    workers.reserve(n_workers);
    for (size_t w = 0; w < n_workers; ++w) {
        workers.emplace_back([&, w]() {
            for (size_t i = w; i < count; i += n_workers) fn(i);
        });
    }
    for (auto& worker : workers) worker.join();
}

}  // namespace qadist
