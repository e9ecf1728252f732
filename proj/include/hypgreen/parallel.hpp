#pragma once

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace hypgreen {

inline int& default_threads() {
    static int n = 1;
    return n;
}

// f(i) for i in [0, n); each index owns its output slot, so results do not depend on scheduling
template <class F>
void parallel_for(std::size_t n, F&& f, int threads = 0) {
    if (threads <= 0) threads = default_threads();
    threads = int(std::min<std::size_t>(std::max(threads, 1), std::max<std::size_t>(n, 1)));
    if (threads == 1) {
        for (std::size_t i = 0; i < n; ++i) f(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr err;
    std::mutex m;
    std::vector<std::thread> pool;
    for (int k = 0; k < threads; ++k)
        pool.emplace_back([&] {
            for (std::size_t i; (i = next++) < n;) {
                try {
                    f(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(m);
                    if (!err) err = std::current_exception();
                }
            }
        });
    for (auto& t : pool) t.join();
    if (err) std::rethrow_exception(err);
}

}  // namespace hypgreen
