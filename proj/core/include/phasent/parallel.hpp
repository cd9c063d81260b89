#pragma once

#include <algorithm>
#include <cstddef>
#include <functional>
#include <thread>
#include <vector>

namespace phasent {

/// Worker count used by the parallel kernels. 0 means hardware concurrency.
void set_worker_count(unsigned workers);
unsigned worker_count();

/// Static block partition of [0, n) over the configured workers. Each block is
/// handed to fn(begin, end, worker_index). Results must not depend on how the
/// range is split; callers only write to disjoint outputs.
template <typename Fn>
void parallel_for_blocks(std::size_t n, Fn&& fn) {
  const std::size_t workers = std::min<std::size_t>(worker_count(), std::max<std::size_t>(n, 1));
  if (workers <= 1) {
    fn(std::size_t{0}, n, std::size_t{0});
    return;
  }
  std::vector<std::jthread> pool;
  pool.reserve(workers - 1);
  const std::size_t chunk = (n + workers - 1) / workers;
  for (std::size_t w = 1; w < workers; ++w) {
    const std::size_t b = std::min(n, w * chunk);
    const std::size_t e = std::min(n, b + chunk);
    pool.emplace_back([&fn, b, e, w] { fn(b, e, w); });
  }
  fn(std::size_t{0}, std::min(n, chunk), std::size_t{0});
}

}  // namespace phasent
