#pragma once

#include <atomic>
#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

namespace cirb {

/// 0 means: CIRB_THREADS from the environment, else hardware concurrency.
unsigned resolve_threads(unsigned requested);

/// Runs fn(task) for task in [0, n_tasks) on up to `threads` workers. If any
/// task throws, the exception of the lowest failing task index is rethrown.
template <typename Fn> void parallel_for(std::size_t n_tasks, unsigned threads, Fn &&fn) {
    threads = resolve_threads(threads);
    if (threads <= 1 || n_tasks <= 1) {
        for (std::size_t i = 0; i < n_tasks; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::exception_ptr> errors(n_tasks);
    auto worker = [&] {
        for (std::size_t i = next.fetch_add(1); i < n_tasks; i = next.fetch_add(1)) {
            try {
                fn(i);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    const std::size_t n_workers = std::min<std::size_t>(threads, n_tasks);
    {
        std::vector<std::jthread> pool;
        pool.reserve(n_workers);
        for (std::size_t w = 0; w < n_workers; ++w) pool.emplace_back(worker);
    }
    for (auto &e : errors)
        if (e) std::rethrow_exception(e);
}

} // namespace cirb
