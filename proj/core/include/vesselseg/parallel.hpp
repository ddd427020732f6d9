#pragma once

#include <cstddef>
#include <functional>

namespace vseg {

// Number of worker threads a request resolves to; 0 means hardware
// concurrency.
int resolve_thread_count(int threads);

// Runs fn(i) for every i in [0, n). Iterations must be independent and their
// writes disjoint, so the result is identical for every thread count.
// Exceptions from workers are rethrown on the calling thread.
void parallel_for(std::size_t n, int threads,
                  const std::function<void(std::size_t)>& fn);

}  // namespace vseg
