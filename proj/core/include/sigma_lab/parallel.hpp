#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace sigma_lab {

unsigned default_jobs();

/// Evaluates fn(i) for every i in [lo, hi] on `jobs` workers and returns the
/// results in ascending i, so the output never depends on the worker count or
/// on scheduling. Work is handed out in fixed-size chunks through a shared
/// counter. The first exception thrown by any worker is rethrown here.
template <class Fn>
auto parallel_map_range(std::uint64_t lo, std::uint64_t hi, unsigned jobs, Fn fn)
    -> std::vector<decltype(fn(lo))> {
    using Result = decltype(fn(lo));
    if (hi < lo) return {};
    const std::uint64_t count = hi - lo + 1;
    std::vector<Result> out(count);
    jobs = std::max(1u, jobs);
    if (jobs == 1 || count == 1) {
        for (std::uint64_t i = 0; i < count; ++i) out[i] = fn(lo + i);
        return out;
    }

    const std::uint64_t chunk = std::max<std::uint64_t>(1, count / (std::uint64_t{jobs} * 8));
    std::atomic<std::uint64_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    {
        std::vector<std::jthread> workers;
        workers.reserve(jobs);
        for (unsigned w = 0; w < jobs; ++w) {
            workers.emplace_back([&] {
                for (;;) {
                    const std::uint64_t begin = next.fetch_add(chunk);
                    if (begin >= count) return;
                    const std::uint64_t end = std::min(count, begin + chunk);
                    try {
                        for (std::uint64_t i = begin; i < end; ++i) out[i] = fn(lo + i);
                    } catch (...) {
                        std::lock_guard lock(failure_mutex);
                        if (!failure) failure = std::current_exception();
                        next.store(count);
                        return;
                    }
                }
            });
        }
    }
    if (failure) std::rethrow_exception(failure);
    return out;
}

}  // namespace sigma_lab
