#pragma once

#include <cstddef>
#include <thread>
#include <vector>

namespace scadda::detail {

// Runs fn(i) for i in [0, n) spread over `workers` threads with a static
// row-interleaved partition. Each index is handled exactly once and writes
// only its own output slots, so results do not depend on the worker count.
template <typename Fn>
void parallel_for(std::size_t n, int workers, Fn&& fn) {
    if (workers <= 1 || n < 2) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    const auto w = static_cast<std::size_t>(workers);
    std::vector<std::thread> pool;
    pool.reserve(w);
    for (std::size_t t = 0; t < w; ++t) {
        pool.emplace_back([t, w, n, &fn] {
            for (std::size_t i = t; i < n; i += w) fn(i);
        });
    }
    for (auto& th : pool) th.join();
}

} // namespace scadda::detail
