#pragma once

#include <algorithm>
#include <cstddef>
#include <thread>
#include <vector>

namespace l2approx::detail {

/// Runs body(i) for i in [0, n) on up to hardware_concurrency threads in
/// contiguous blocks. Callers write results into per-index slots and reduce
/// afterwards, so sums do not depend on the thread count.
template <typename Body>
void parallel_for(std::size_t n, Body&& body, std::size_t min_block = 256) {
  const std::size_t hw = std::max<std::size_t>(1, std::thread::hardware_concurrency());
  const std::size_t workers = std::min(hw, std::max<std::size_t>(1, n / min_block));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::vector<std::jthread> threads;
  threads.reserve(workers);
  const std::size_t block = (n + workers - 1) / workers;
  for (std::size_t w = 0; w < workers; ++w) {
    const std::size_t lo = w * block;
    const std::size_t hi = std::min(n, lo + block);
    if (lo >= hi) break;
    threads.emplace_back([lo, hi, &body] {
      for (std::size_t i = lo; i < hi; ++i) body(i);
    });
  }
}

}  // namespace l2approx::detail
