#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <functional>
#include <thread>
#include <vector>

namespace rwe {

/// Fixed chunk count for data-parallel loops. Keeping it independent of the
/// hardware thread count makes chunked reductions deterministic everywhere.
inline constexpr std::size_t kParallelChunks = 64;

/// Runs fn(chunk_index, begin, end) over [0, total) split into
/// kParallelChunks contiguous chunks. Chunks may run on any thread; callers
/// that reduce must merge per-chunk state in chunk-index order.
inline void parallel_chunks(std::size_t total,
                            const std::function<void(std::size_t, std::size_t, std::size_t)>& fn) {
  if (total == 0) return;
  const std::size_t nchunks = std::min(kParallelChunks, total);
  const std::size_t per = (total + nchunks - 1) / nchunks;
  unsigned hw = std::thread::hardware_concurrency();
  if (hw == 0) hw = 1;
  const std::size_t nthreads = std::min<std::size_t>(hw, nchunks);
  if (nthreads <= 1) {
    for (std::size_t c = 0; c < nchunks; ++c) {
      const std::size_t begin = c * per;
      const std::size_t end = std::min(total, begin + per);
      if (begin < end) fn(c, begin, end);
    }
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> workers;
  workers.reserve(nthreads);
  for (std::size_t t = 0; t < nthreads; ++t) {
    workers.emplace_back([&] {
      for (;;) {
        const std::size_t c = next.fetch_add(1);
        if (c >= nchunks) return;
        const std::size_t begin = c * per;
        const std::size_t end = std::min(total, begin + per);
        if (begin < end) fn(c, begin, end);
      }
    });
  }
  for (auto& w : workers) w.join();
}

}  // namespace rwe
