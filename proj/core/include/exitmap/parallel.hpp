#pragma once

#include <cstddef>
#include <functional>

namespace exitmap {

/// Number of worker threads: EXITMAP_THREADS if set, else hardware concurrency.
int worker_count();

/// Runs fn(i) for i in [0, n). Work items must be independent; results should
/// be written to preallocated slots indexed by i so output order is
/// deterministic regardless of scheduling.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

} // namespace exitmap
