#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace adaptm {

/// Default worker count: ADAPTMREG_WORKERS if set, else hardware concurrency.
inline unsigned default_workers() {
    if (const char* env = std::getenv("ADAPTMREG_WORKERS")) {
        const long v = std::strtol(env, nullptr, 10);
        if (v > 0) return static_cast<unsigned>(v);
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

/// body(begin, end) once per worker over a contiguous index range. The first
/// exception thrown by any worker is rethrown after all workers join.
template <class Body>
void parallel_chunks(std::size_t n, unsigned workers, Body&& body) {
    workers = std::max(1u, workers);
    const std::size_t used = std::max<std::size_t>(1, std::min<std::size_t>(workers, n));
    if (used == 1) {
        body(std::size_t{0}, n);
        return;
    }
    std::exception_ptr failure;
    std::mutex failure_mutex;
    {
        std::vector<std::jthread> pool;
        pool.reserve(used);
        for (std::size_t w = 0; w < used; ++w) {
            const std::size_t begin = n * w / used;
            const std::size_t end = n * (w + 1) / used;
            pool.emplace_back([&, begin, end] {
                try {
                    body(begin, end);
                } catch (...) {
                    std::lock_guard lock(failure_mutex);
                    if (!failure) failure = std::current_exception();
                }
            });
        }
    }
    if (failure) std::rethrow_exception(failure);
}

/// Runs body(i) for i in [0, n) over `workers` threads with static contiguous
/// chunks. Callers write into preallocated per-index slots, so results never
/// depend on scheduling.
template <class Body>
void parallel_for(std::size_t n, unsigned workers, Body&& body) {
    parallel_chunks(n, workers, [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) body(i);
    });
}

}  // namespace adaptm
