#pragma once

#include <cstddef>
#include <functional>

namespace nilflow {

/// Worker count, capped by NILFLOW_THREADS (default 1).
unsigned worker_count();

/// Runs body(i) for i in [0, n). Every index is written by exactly one call,
/// so results do not depend on the worker count.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace nilflow
