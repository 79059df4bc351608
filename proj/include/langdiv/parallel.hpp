#pragma once

#include <cstddef>
#include <exception>
#include <functional>
#include <thread>
#include <vector>

namespace langdiv {

inline unsigned resolve_threads(int threads) {
    if (threads > 0) return static_cast<unsigned>(threads);
    const unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? hw : 1;
}

// Runs body(begin, end) over a static partition of [0, count). Workers get
// contiguous index blocks, so callers writing to per-index output slots are
// race-free and the result does not depend on the thread count.
inline void parallel_for(std::size_t count, int threads,
                         const std::function<void(std::size_t, std::size_t)>& body) {
    const unsigned n_threads = resolve_threads(threads);
    if (n_threads <= 1 || count < 2 * n_threads) {
        body(0, count);
        return;
    }
    std::vector<std::thread> workers;
    std::vector<std::exception_ptr> errors(n_threads);
    const std::size_t chunk = (count + n_threads - 1) / n_threads;
    for (unsigned t = 0; t < n_threads; ++t) {
        const std::size_t begin = t * chunk;
        const std::size_t end = std::min(count, begin + chunk);
        if (begin >= end) break;
        workers.emplace_back([&, t, begin, end] {
            try {
                body(begin, end);
            } catch (...) {
                errors[t] = std::current_exception();
            }
        });
    }
    for (auto& w : workers) w.join();
    for (auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
}

} // namespace langdiv
