#pragma once

#include <atomic>
#include <cstddef>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace ionheat {

/// Run body(i) for i in [0, count) on up to `workers` threads. Tasks must
/// write only to their own output slots; with that contract the result is
/// identical at any worker count, since no operation here depends on
/// scheduling order.
inline void parallel_for(std::size_t count, int workers,
                         const std::function<void(std::size_t)>& body) {
    if (count == 0) return;
    const unsigned hw = std::thread::hardware_concurrency();
    std::size_t n_threads = workers > 0 ? static_cast<std::size_t>(workers)
                                        : static_cast<std::size_t>(hw ? hw : 1);
    n_threads = std::min(n_threads, count);

    if (n_threads <= 1) {
        for (std::size_t i = 0; i < count; ++i) body(i);
        return;
    }

    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    auto worker = [&]() {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= count) return;
            try {
                body(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!error) error = std::current_exception();
                return;
            }
        }
    };

    std::vector<std::thread> pool;
    pool.reserve(n_threads);
    for (std::size_t t = 0; t < n_threads; ++t) pool.emplace_back(worker);
    for (std::thread& t : pool) t.join();
    if (error) std::rethrow_exception(error);
}

}  // namespace ionheat
