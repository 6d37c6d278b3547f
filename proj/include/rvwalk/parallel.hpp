#pragma once

#include <cstdint>
#include <thread>
#include <vector>

namespace rvwalk {

inline int hardware_threads() {
  const unsigned n = std::thread::hardware_concurrency();
  return n == 0 ? 1 : static_cast<int>(n);
}

inline int resolve_threads(int requested) {
  return requested > 0 ? requested : hardware_threads();
}

// Run fn(worker, index) for index in [0, count) over contiguous chunks. Replication
// results must depend only on the index (substream discipline), so the partition is
// invisible in the output and counts reduce identically for any thread count.
template <class Fn>
inline void parallel_for(std::int64_t count, int threads, Fn fn) {
  threads = resolve_threads(threads);
  if (threads <= 1 || count < 2) {
    for (std::int64_t i = 0; i < count; ++i) fn(0, i);
    return;
  }
  const auto workers = static_cast<std::int64_t>(threads);
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(workers));
  const std::int64_t chunk = (count + workers - 1) / workers;
  for (std::int64_t w = 0; w < workers; ++w) {
    const std::int64_t begin = w * chunk;
    const std::int64_t end = std::min(count, begin + chunk);
    if (begin >= end) break;
    pool.emplace_back([w, begin, end, &fn] {
      for (std::int64_t i = begin; i < end; ++i) fn(static_cast<int>(w), i);
    });
  }
  for (auto& t : pool) t.join();
}

}  // namespace rvwalk
