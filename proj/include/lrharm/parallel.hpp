#pragma once

#include <atomic>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace lrharm {

// Runs fn(0..count-1) on up to jobs threads. Cells must write to disjoint
// per-index slots; the caller assembles results in index order, so output is
// independent of the parallelism degree. The first cell exception is rethrown
// after all workers stop.
inline void parallel_for(long count, int jobs, const std::function<void(long)>& fn) {
    if (count <= 0) return;
    const long workers = std::max(1L, std::min(static_cast<long>(jobs), count));
    if (workers == 1) {
        for (long k = 0; k < count; ++k) fn(k);
        return;
    }
    std::atomic<long> next{0};
    std::exception_ptr first_error;
    std::mutex error_mutex;
    std::vector<std::thread> pool;
    pool.reserve(static_cast<size_t>(workers));
    for (long w = 0; w < workers; ++w)
        pool.emplace_back([&] {
            for (;;) {
                const long k = next.fetch_add(1);
                if (k >= count) return;
                try {
                    fn(k);
                } catch (...) {
                    const std::lock_guard<std::mutex> lock(error_mutex);
                    if (!first_error) first_error = std::current_exception();
                    return;
                }
            }
        });
    for (auto& th : pool) th.join();
    if (first_error) std::rethrow_exception(first_error);
}

}  // namespace lrharm
