#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace karlin {

/// Resolves 0 to the number of hardware threads.
inline unsigned resolve_threads(unsigned requested) {
    if (requested != 0) return requested;
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : hw;
}

/**
 * results[i] = fn(i) for i in [0, count), computed on up to `threads` workers.
 * Each index is self-contained (it derives its own rng stream), and results are
 * stored by index, so the output never depends on the thread count.
 */
template <typename T, typename Fn>
std::vector<T> parallel_map(std::uint64_t count, unsigned threads, Fn&& fn) {
    std::vector<T> results(count);
    const unsigned workers = static_cast<unsigned>(std::min<std::uint64_t>(resolve_threads(threads), count));
    if (workers <= 1) {
        for (std::uint64_t i = 0; i < count; ++i) results[i] = fn(i);
        return results;
    }
    std::atomic<std::uint64_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto work = [&] {
        try {
            for (std::uint64_t i = next++; i < count; i = next++) results[i] = fn(i);
        } catch (...) {
            std::lock_guard lock(failure_mutex);
            if (!failure) failure = std::current_exception();
            next = count;
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);
    return results;
}

}  // namespace karlin
