#pragma once

#include <atomic>
#include <cstddef>
#include <exception>
#include <thread>
#include <utility>
#include <vector>

namespace mribow {

/// Runs fn(i) for every i in [0, n) on up to `workers` threads.
///
/// Tasks must be independent and write only to per-index slots; under that
/// contract the result is identical for any worker count. If several tasks
/// throw, the exception from the lowest index is rethrown so the failure
/// observed does not depend on scheduling.
template <typename Fn>
void parallel_for(std::size_t n, unsigned workers, Fn&& fn) {
    if (n == 0) return;
    unsigned use = workers == 0 ? 1u : workers;
    if (static_cast<std::size_t>(use) > n) use = static_cast<unsigned>(n);

    if (use <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }

    std::atomic<std::size_t> next{0};
    std::vector<std::exception_ptr> errors(n);
    std::vector<std::thread> pool;
    pool.reserve(use);
    for (unsigned t = 0; t < use; ++t) {
        pool.emplace_back([&] {
            for (;;) {
                std::size_t i = next.fetch_add(1, std::memory_order_relaxed);
                if (i >= n) return;
                try {
                    fn(i);
                } catch (...) {
                    errors[i] = std::current_exception();
                }
            }
        });
    }
    for (auto& th : pool) th.join();
    for (auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
}

}  // namespace mribow
