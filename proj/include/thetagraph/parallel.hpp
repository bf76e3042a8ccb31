#pragma once

#include <cstdint>
#include <functional>

namespace theta {

/// Number of workers actually used for `nthreads` requested (0 = one per
/// hardware thread).
unsigned resolve_threads(unsigned nthreads) noexcept;

/// Runs fn(i) for every i in [0, count), splitting the range into
/// contiguous blocks across at most `nthreads` workers (0 = hardware
/// concurrency). Iterations must be independent; the first exception
/// thrown by any worker is rethrown on the calling thread.
void parallel_for(std::uint64_t count, unsigned nthreads,
                  const std::function<void(std::uint64_t)>& fn);

} // namespace theta
