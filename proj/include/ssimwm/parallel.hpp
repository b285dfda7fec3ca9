#pragma once

#include <algorithm>
#include <cstddef>
#include <thread>
#include <vector>

namespace ssimwm::detail {

// Runs body(i) for i in [0, count) on a few worker threads. Each index is
// handled exactly once; callers write results into per-index slots so the
// outcome does not depend on scheduling.
template <class Body>
void parallelFor(std::size_t count, Body&& body) {
  const std::size_t hw = std::max(1u, std::thread::hardware_concurrency());
  const std::size_t workers = std::min<std::size_t>(hw, count / 64 + 1);
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::vector<std::jthread> pool;
  pool.reserve(workers);
  const std::size_t chunk = (count + workers - 1) / workers;
  for (std::size_t w = 0; w < workers; ++w) {
    const std::size_t begin = w * chunk;
    const std::size_t end = std::min(count, begin + chunk);
    if (begin >= end) break;
    pool.emplace_back([begin, end, &body] {
      for (std::size_t i = begin; i < end; ++i) body(i);
    });
  }
}

}  // namespace ssimwm::detail
