#pragma once

#include <functional>

namespace pwl {

/// Worker count: hardware concurrency, capped by the PWL_THREADS environment variable.
int worker_count();

/// Splits [begin, end) into contiguous chunks, one per worker. Chunks never
/// share indices, so fn may write to disjoint outputs without locking.
void parallel_for(int begin, int end, const std::function<void(int, int)>& fn,
                  int min_chunk = 1);

}  // namespace pwl
