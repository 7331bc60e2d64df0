#pragma once

#include <cstdint>
#include <functional>
#include <thread>
#include <vector>

namespace wii {

// Static index partition, one contiguous block per worker. Every index is
// written by exactly one worker, so results never depend on the thread
// count or schedule.
inline void parallel_for(std::int64_t n, int threads,
                         const std::function<void(std::int64_t)>& fn) {
  if (threads <= 1 || n < 2 * threads) {
    for (std::int64_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(threads));
  for (int t = 0; t < threads; ++t) {
    const std::int64_t lo = n * t / threads;
    const std::int64_t hi = n * (t + 1) / threads;
    pool.emplace_back([lo, hi, &fn] {
      for (std::int64_t i = lo; i < hi; ++i) fn(i);
    });
  }
  for (auto& th : pool) th.join();
}

}  // namespace wii
