#include "nilflow/parallel.hpp"

#include <algorithm>
#include <cstdlib>
#include <string>
#include <thread>
#include <vector>

namespace nilflow {

unsigned worker_count() {
  static const unsigned count = [] {
    const char* env = std::getenv("NILFLOW_THREADS");
    if (env == nullptr) return 1u;
    try {
      const long v = std::stol(env);
      const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
      return static_cast<unsigned>(std::clamp<long>(v, 1, hw));
    } catch (...) {
      return 1u;
    }
  }();
  return count;
}

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body) {
  const unsigned workers = worker_count();
  // Thread start-up dominates for the small grids used at desk scale.
  if (workers <= 1 || n < 512) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::vector<std::jthread> pool;
  const std::size_t chunk = (n + workers - 1) / workers;
  for (unsigned w = 0; w < workers; ++w) {
    const std::size_t lo = w * chunk;
    const std::size_t hi = std::min(n, lo + chunk);
    if (lo >= hi) break;
    pool.emplace_back([lo, hi, &body] {
      for (std::size_t i = lo; i < hi; ++i) body(i);
    });
  }
}

}  // namespace nilflow
