#pragma once

#include <algorithm>
#include <cstddef>
#include <functional>
#include <thread>
#include <vector>

namespace walklab {

// Static partition of [0, n) into `workers` contiguous chunks. Each chunk is
// handed to fn(begin, end, chunk_index); chunk boundaries depend only on n and
// workers, never on scheduling.
inline void parallel_chunks(std::size_t n, int workers,
                            const std::function<void(std::size_t, std::size_t, int)>& fn) {
  workers = std::max(1, workers);
  if (workers == 1 || n < 2) {
    fn(0, n, 0);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(workers));
  for (int w = 0; w < workers; ++w) {
    std::size_t begin = n * static_cast<std::size_t>(w) / static_cast<std::size_t>(workers);
    std::size_t end = n * static_cast<std::size_t>(w + 1) / static_cast<std::size_t>(workers);
    if (begin == end) continue;
    pool.emplace_back(fn, begin, end, w);
  }
  for (auto& t : pool) t.join();
}

}  // namespace walklab
