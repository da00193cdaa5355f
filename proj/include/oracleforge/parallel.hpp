#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

namespace oracleforge {

// Applies fn to every input on up to `jobs` threads. Results keep input order.
// The first exception thrown by fn is rethrown after all workers stop.
template <typename In, typename Fn>
auto parallel_map(const std::vector<In>& inputs, unsigned jobs, Fn fn)
    -> std::vector<decltype(fn(inputs[0], std::size_t{0}))>
{
    using Out = decltype(fn(inputs[0], std::size_t{0}));
    std::vector<Out> out(inputs.size());
    const std::size_t n = inputs.size();
    const unsigned workers = static_cast<unsigned>(std::min<std::size_t>(std::max(1u, jobs), n));
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) {
            out[i] = fn(inputs[i], i);
        }
        return out;
    }

    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::atomic<bool> failed{false};
    auto work = [&] {
        for (std::size_t i = next++; i < n && !failed; i = next++) {
            try {
                out[i] = fn(inputs[i], i);
            } catch (...) {
                if (!failed.exchange(true)) {
                    error = std::current_exception();
                }
            }
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
        pool.emplace_back(work);
    }
    for (auto& t : pool) {
        t.join();
    }
    if (error) {
        std::rethrow_exception(error);
    }
    return out;
}

} // namespace oracleforge
