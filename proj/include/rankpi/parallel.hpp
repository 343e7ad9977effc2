#pragma once

#include <cstddef>
#include <functional>

namespace rankpi {

/// Worker count: RANKPI_THREADS when set to a positive integer, else hardware concurrency.
[[nodiscard]] unsigned worker_count();

/// Calls fn(i) for every i in [0, count). Each index is visited exactly once; order is unspecified.
/// The first exception thrown by fn is rethrown after all workers finish.
void parallel_for(std::size_t count, const std::function<void(std::size_t)> &fn);

}  // namespace rankpi
