#pragma once

#include <cstddef>
#include <functional>

namespace anndyn {

/// Worker count: ANNDYN_THREADS when set to a positive integer, otherwise
/// std::thread::hardware_concurrency() (at least 1).
unsigned worker_count();

/// Calls body(i) for every i in [0, n). Each index is handled exactly once;
/// results must be written to per-index slots so output order never depends
/// on scheduling. The first exception thrown by any body is rethrown.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace anndyn
