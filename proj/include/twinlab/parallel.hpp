#pragma once

#include <cstddef>
#include <functional>

namespace twinlab {

// requested = 0 -> TWINLAB_THREADS env var, else hardware concurrency.
int thread_count(int requested = 0);

// Static contiguous chunking; fn(begin, end) per chunk. Results must not
// depend on the chunking (writers own disjoint ranges).
void parallel_for(std::size_t n, const std::function<void(std::size_t, std::size_t)>& fn,
                  int threads = 0);

}  // namespace twinlab
