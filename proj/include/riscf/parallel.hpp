#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace riscf {

struct RunOptions {
    unsigned threads = 0; // 0 = hardware concurrency
    std::size_t batches = 32;

    unsigned resolved_threads() const
    {
        if (threads > 0)
            return threads;
        return std::max(1u, std::thread::hardware_concurrency());
    }
};

/// Splits [0, trials) into fixed contiguous batches and runs
/// fn(trial, batch_accumulator) over them on a worker pool.
///
/// The partition depends only on (trials, batches), and each batch is folded
/// serially in trial order, so reducing the returned vector front to back
/// gives bitwise identical results for any thread count.
template <class Acc, class Fn>
std::vector<Acc> run_batches(std::uint64_t trials, const RunOptions& opts, const Acc& init, Fn&& fn)
{
    const std::uint64_t batches = std::max<std::uint64_t>(1, std::min<std::uint64_t>(opts.batches, trials));
    std::vector<Acc> out(static_cast<std::size_t>(batches), init);
    if (trials == 0)
        return out;

    std::atomic<std::uint64_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;

    auto worker = [&] {
        for (;;) {
            const std::uint64_t b = next.fetch_add(1);
            if (b >= batches)
                return;
            const std::uint64_t lo = trials * b / batches;
            const std::uint64_t hi = trials * (b + 1) / batches;
            try {
                for (std::uint64_t t = lo; t < hi; ++t)
                    fn(t, out[static_cast<std::size_t>(b)]);
            } catch (...) {
                std::lock_guard<std::mutex> lock(failure_mutex);
                if (!failure)
                    failure = std::current_exception();
                next.store(batches);
                return;
            }
        }
    };

    const unsigned n = static_cast<unsigned>(std::min<std::uint64_t>(opts.resolved_threads(), batches));
    if (n <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(n);
        for (unsigned i = 0; i < n; ++i)
            pool.emplace_back(worker);
        for (auto& t : pool)
            t.join();
    }
    if (failure)
        std::rethrow_exception(failure);
    return out;
}

} // namespace riscf
