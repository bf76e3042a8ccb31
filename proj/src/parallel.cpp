#include "thetagraph/parallel.hpp"

#include <algorithm>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace theta {

unsigned resolve_threads(unsigned nthreads) noexcept {
    if (nthreads != 0) return nthreads;
    unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : hw;
}

void parallel_for(std::uint64_t count, unsigned nthreads,
                  const std::function<void(std::uint64_t)>& fn) {
    if (count == 0) return;
    unsigned workers = resolve_threads(nthreads);
    if (std::uint64_t(workers) > count) workers = unsigned(count);
    if (workers == 1) {
        for (std::uint64_t i = 0; i < count; ++i) fn(i);
        return;
    }

    std::exception_ptr first_error;
    std::mutex error_mutex;
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
        // contiguous blocks, remainder spread over the leading workers
        const std::uint64_t base = count / workers, extra = count % workers;
        const std::uint64_t begin = w * base + std::min<std::uint64_t>(w, extra);
        const std::uint64_t end = begin + base + (w < extra ? 1 : 0);
        pool.emplace_back([&, begin, end] {
            try {
                for (std::uint64_t i = begin; i < end; ++i) fn(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!first_error) first_error = std::current_exception();
            }
        });
    }
    for (auto& t : pool) t.join();
    if (first_error) std::rethrow_exception(first_error);
}

} // namespace theta
