#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

namespace rerw {

/// Number of worker threads for `requested` (0 means hardware concurrency).
inline unsigned resolve_threads(unsigned requested)
{
    if (requested > 0) return requested;
    return std::max(1u, std::thread::hardware_concurrency());
}

/// Runs fn(i) for i in [0, count) on `threads` workers. Each index is handled
/// exactly once; callers write results into slot i, so the outcome does not
/// depend on scheduling. The exception from the lowest failing index is
/// rethrown after all workers stop.
template <class Fn>
void parallel_for(std::size_t count, unsigned threads, Fn&& fn)
{
    threads = std::min<std::size_t>(resolve_threads(threads), std::max<std::size_t>(count, 1));
    std::atomic<std::size_t> next{0};
    std::atomic<bool> stop{false};
    std::vector<std::exception_ptr> errors(threads);
    std::vector<std::size_t> error_index(threads, count);

    auto worker = [&](unsigned id) {
        for (;;) {
            if (stop.load(std::memory_order_relaxed)) return;
            const std::size_t i = next.fetch_add(1);
            if (i >= count) return;
            try {
                fn(i);
            } catch (...) {
                errors[id] = std::current_exception();
                error_index[id] = i;
                stop = true;
                return;
            }
        }
    };

    if (threads == 1) {
        worker(0);
    } else {
        std::vector<std::thread> pool;
        pool.reserve(threads);
        for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker, t);
        for (auto& t : pool) t.join();
    }

    std::size_t first = count;
    std::exception_ptr err;
    for (unsigned t = 0; t < threads; ++t)
        if (errors[t] && error_index[t] < first) {
            first = error_index[t];
            err = errors[t];
        }
    if (err) std::rethrow_exception(err);
}

} // namespace rerw
