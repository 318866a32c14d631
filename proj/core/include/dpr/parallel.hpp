#pragma once

#include <atomic>
#include <functional>
#include <thread>
#include <vector>

namespace dpr {

// Deterministic trial-level parallel map: each index owns its work and its
// output slot, so results are identical for any worker count.
inline void parallel_for_indexed(int count, int workers, const std::function<void(int)>& body) {
  workers = std::min(workers, count);
  if (workers <= 1) {
    for (int i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (int w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      for (int i = next.fetch_add(1); i < count; i = next.fetch_add(1)) body(i);
    });
  for (auto& t : pool) t.join();
}

}  // namespace dpr
