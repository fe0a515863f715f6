#ifndef EQFLOW_PARALLEL_HPP
#define EQFLOW_PARALLEL_HPP

#include <atomic>
#include <exception>
#include <thread>
#include <vector>

namespace eqflow {

/// Runs fn(0..n-1), optionally across threads. Results must be written to
/// pre-indexed slots by the callable so the outcome is schedule-independent.
/// If several iterations throw, the exception of the smallest index is
/// rethrown.
template <typename F>
void parallel_for(int n, int threads, F&& fn) {
    if (n <= 0) return;
    if (threads <= 1 || n == 1) {
        for (int i = 0; i < n; ++i) fn(i);
        return;
    }
    int workers = std::min(threads, n);
    std::vector<std::exception_ptr> errors(static_cast<size_t>(n));
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    pool.reserve(static_cast<size_t>(workers));
    for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&]() {
            for (;;) {
                int i = next.fetch_add(1);
                if (i >= n) return;
                try {
                    fn(i);
                } catch (...) {
                    errors[static_cast<size_t>(i)] = std::current_exception();
                }
            }
        });
    }
    for (auto& t : pool) t.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

}  // namespace eqflow

#endif
