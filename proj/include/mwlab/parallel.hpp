#pragma once

#include <cstddef>
#include <functional>

namespace mwlab {

/// Worker count: hardware concurrency capped by MWLAB_THREADS (>= 1).
int thread_count();

/// Calls fn(i) for i in [0, n). Each index is handled exactly once; callers
/// write to disjoint slots, so results do not depend on scheduling.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn, std::size_t min_chunk = 1);

}  // namespace mwlab
