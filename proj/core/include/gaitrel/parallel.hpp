#pragma once

#include <algorithm>
#include <cstddef>
#include <thread>
#include <vector>

namespace gaitrel {

/// Runs fn(i) for i in [0, n) on up to `threads` workers with contiguous chunks.
/// threads <= 1 runs inline. Callers write results into per-index slots and
/// reduce sequentially afterwards, so the outcome does not depend on `threads`.
template <typename Fn>
void parallel_for(std::size_t n, std::size_t threads, Fn&& fn) {
  threads = std::min(threads, n);
  if (threads <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::jthread> workers;
  workers.reserve(threads);
  const std::size_t chunk = (n + threads - 1) / threads;
  for (std::size_t t = 0; t < threads; ++t) {
    const std::size_t begin = t * chunk;
    const std::size_t end = std::min(n, begin + chunk);
    if (begin >= end) break;
    workers.emplace_back([begin, end, &fn] {
      for (std::size_t i = begin; i < end; ++i) fn(i);
    });
  }
}

}  // namespace gaitrel
