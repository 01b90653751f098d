#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace survival {

// Number of workers to use when the caller asks for `requested` (0 = all
// hardware threads).
inline unsigned resolve_threads(int requested)
{
    if (requested > 0) return static_cast<unsigned>(requested);
    return std::max(1u, std::thread::hardware_concurrency());
}

// Runs body(i) for i in [0, count) on `threads` workers using contiguous
// blocks. Results must be written to per-index slots so the outcome does not
// depend on scheduling. The first exception thrown by a worker is rethrown.
template <class Body>
void parallel_for(std::size_t count, int threads, Body&& body)
{
    const std::size_t workers = std::min<std::size_t>(resolve_threads(threads), std::max<std::size_t>(count, 1));
    if (workers <= 1) {
        for (std::size_t i = 0; i < count; ++i) body(i);
        return;
    }
    std::exception_ptr error;
    std::mutex error_mutex;
    std::vector<std::thread> pool;
    pool.reserve(workers);
    const std::size_t block = (count + workers - 1) / workers;
    for (std::size_t w = 0; w < workers; ++w) {
        const std::size_t begin = w * block;
        const std::size_t end = std::min(count, begin + block);
        if (begin >= end) break;
        pool.emplace_back([&, begin, end] {
            try {
                for (std::size_t i = begin; i < end; ++i) body(i);
            } catch (...) {
                std::lock_guard lock(error_mutex);
                if (!error) error = std::current_exception();
            }
        });
    }
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);
}

} // namespace survival
