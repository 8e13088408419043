#pragma once

#include <atomic>
#include <cstddef>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace mf {

// Global worker count for blockwise parallelism; 0 = hardware default.
// Results must not depend on this (each work item writes only its own slot).
inline int& thread_count() {
    static int n = 0;
    return n;
}

inline int effective_threads() {
    int n = thread_count();
    if (n <= 0) n = int(std::thread::hardware_concurrency());
    if (n <= 0) n = 1;
    return n;
}

// Runs fn(i) for i in [0, n). Exceptions are rethrown on the caller thread.
inline void parallel_for(size_t n, const std::function<void(size_t)>& fn) {
    int workers = effective_threads();
    if (workers <= 1 || n <= 1) {
        for (size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<size_t> next{0};
    std::exception_ptr err;
    std::mutex err_mu;
    auto body = [&] {
        for (;;) {
            size_t i = next.fetch_add(1);
            if (i >= n) return;
            try {
                fn(i);
            } catch (...) {
                std::lock_guard<std::mutex> lk(err_mu);
                if (!err) err = std::current_exception();
                return;
            }
        }
    };
    std::vector<std::thread> pool;
    int spawn = std::min<size_t>(workers, n);
    pool.reserve(spawn);
    for (int t = 0; t < spawn; ++t) pool.emplace_back(body);
    for (auto& th : pool) th.join();
    if (err) std::rethrow_exception(err);
}

} // namespace mf
