#pragma once

#include <cstddef>
#include <functional>

namespace plm {

// Worker count: PLM_NUM_THREADS if set (>= 1), otherwise the hardware concurrency.
int worker_count();

// Runs fn(i) for i in [0, n) over contiguous chunks. If any call throws, the
// exception raised at the smallest index is rethrown, independent of scheduling.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace plm
