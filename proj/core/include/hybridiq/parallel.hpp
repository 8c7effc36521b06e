#pragma once

#include <cstddef>
#include <functional>

namespace hybridiq {

// Worker count from HYBRIDIQ_THREADS (unset or 0 = hardware concurrency).
unsigned thread_count();

// Runs fn(i) for i in [0, count). Each index is handled by exactly one
// worker, so callers that write only to slot i get results independent of
// the thread count.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& fn,
                  std::size_t min_parallel = 16);

}  // namespace hybridiq
