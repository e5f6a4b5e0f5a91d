#pragma once

#include <atomic>
#include <functional>
#include <thread>
#include <vector>

namespace beamre {

/// Run fn(0..n-1) on up to `threads` workers. Results must be written to
/// pre-sized slots indexed by i; completion order is unspecified but the
/// caller consumes the slots in index order, so output is deterministic.
inline void parallel_for(int n, int threads,
                         const std::function<void(int)>& fn) {
  if (threads <= 1 || n <= 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  const int workers = std::min(threads, n);
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (int w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      for (int i = next.fetch_add(1); i < n; i = next.fetch_add(1)) fn(i);
    });
  for (auto& t : pool) t.join();
}

}  // namespace beamre
