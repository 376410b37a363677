#pragma once

#include <algorithm>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace walkbsde {

/// Splits [0,count) into contiguous chunks, one per worker thread. Results
/// must be written to disjoint slots so the outcome is independent of the
/// split. The first exception thrown by a worker is rethrown on the caller.
inline void parallel_for(long count, const std::function<void(long, long)>& chunk,
                         long grain = 16384) {
    unsigned hw = std::thread::hardware_concurrency();
    long workers = std::max(1L, std::min<long>(hw == 0 ? 1 : hw, count / grain));
    if (workers <= 1) {
        chunk(0, count);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(static_cast<size_t>(workers));
    std::exception_ptr failure;
    std::mutex failure_mutex;
    long per = (count + workers - 1) / workers;
    for (long w = 0; w < workers; ++w) {
        long lo = w * per;
        long hi = std::min(count, lo + per);
        if (lo >= hi) break;
        pool.emplace_back([&, lo, hi] {
            try {
                chunk(lo, hi);
            } catch (...) {
                std::lock_guard<std::mutex> hold(failure_mutex);
                if (!failure) failure = std::current_exception();
            }
        });
    }
    for (auto& th : pool) th.join();
    if (failure) std::rethrow_exception(failure);
}

}  // namespace walkbsde
