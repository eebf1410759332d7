#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace acclab {

// Runs body(i) for i in [0, count) on up to `jobs` threads. Results must be written
// to per-index slots so the outcome does not depend on scheduling. The first
// exception (lowest index) is rethrown after all workers finish.
template <class Body>
void parallel_for(std::size_t count, int jobs, Body body) {
    const std::size_t workers = std::min<std::size_t>(count, std::size_t(std::max(1, jobs)));
    if (workers <= 1) {
        for (std::size_t i = 0; i < count; ++i) body(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::mutex m;
    std::size_t err_index = count;
    std::exception_ptr err;
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w)
        pool.emplace_back([&] {
            for (std::size_t i; (i = next++) < count;) {
                try {
                    body(i);
                } catch (...) {
                    std::lock_guard lk(m);
                    if (i < err_index) { err_index = i; err = std::current_exception(); }
                }
            }
        });
    for (auto& t : pool) t.join();
    if (err) std::rethrow_exception(err);
}

} // namespace acclab
