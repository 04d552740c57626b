#pragma once

// Index-ordered parallel map. Results land in input order regardless of the
// worker count, so output built from them is deterministic.

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace pic {

inline std::size_t default_threads() {
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : hw;
}

/// Calls fn(i) for i in [0, n) on up to `threads` workers and returns the
/// results in index order. The first exception thrown by any call is rethrown.
template <typename Fn>
auto parallel_map(std::size_t n, std::size_t threads, Fn fn) -> std::vector<decltype(fn(std::size_t{}))> {
    using R = decltype(fn(std::size_t{}));
    std::vector<R> out(n);
    threads = std::clamp<std::size_t>(threads, 1, std::max<std::size_t>(n, 1));
    if (threads == 1) {
        for (std::size_t i = 0; i < n; ++i) out[i] = fn(i);
        return out;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_lock;
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (std::size_t t = 0; t < threads; ++t) {
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < n; i = next++) {
                try {
                    out[i] = fn(i);
                } catch (...) {
                    std::lock_guard lock(failure_lock);
                    if (!failure) failure = std::current_exception();
                }
            }
        });
    }
    for (auto& th : pool) th.join();
    if (failure) std::rethrow_exception(failure);
    return out;
}

} // namespace pic
