#pragma once

#include <atomic>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace multires {

// Runs task(i) for i in [0, n_tasks) on up to `threads` workers. Tasks must
// write to disjoint slots; there are no shared reductions, so results do not
// depend on the thread count or on scheduling. The first exception thrown by
// a task is rethrown on the calling thread after all workers join.
inline void parallel_for(int n_tasks, int threads, const std::function<void(int)>& task) {
    if (n_tasks <= 0) return;
    const int n_workers = std::min(threads < 1 ? 1 : threads, n_tasks);
    if (n_workers == 1) {
        for (int i = 0; i < n_tasks; ++i) task(i);
        return;
    }
    std::atomic<int> next{0};
    std::exception_ptr first_error = nullptr;
    std::mutex error_mutex;
    auto worker = [&]() {
        for (;;) {
            const int i = next.fetch_add(1);
            if (i >= n_tasks) return;
            try {
                task(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!first_error) first_error = std::current_exception();
            }
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(n_workers));
    for (int w = 0; w < n_workers; ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
    if (first_error) std::rethrow_exception(first_error);
}

}  // namespace multires
