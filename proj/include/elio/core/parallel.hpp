#pragma once

#include <atomic>
#include <cstddef>
#include <thread>
#include <vector>

namespace elio {

/// Runs fn(i) for i in [0, n). With threads > 1 the iterations are dispatched
/// in dynamic chunks; callers must ensure fn(i) touches only slot i so the
/// result is identical to the serial order.
template <typename Fn>
void parallel_for(std::size_t n, int threads, Fn&& fn) {
  if (threads <= 1 || n < 256) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  const std::size_t chunk = 256;
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (;;) {
      const std::size_t start = next.fetch_add(chunk);
      if (start >= n) return;
      const std::size_t end = std::min(start + chunk, n);
      for (std::size_t i = start; i < end; ++i) fn(i);
    }
  };
  std::vector<std::thread> pool;
  const int count = std::min<int>(threads, static_cast<int>(std::thread::hardware_concurrency()));
  pool.reserve(count > 1 ? count - 1 : 0);
  for (int t = 1; t < count; ++t) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();
}

}  // namespace elio
