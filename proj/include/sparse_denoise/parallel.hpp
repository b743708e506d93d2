// Copyright (c) 2026 sparse-denoise contributors.
// SPDX-License-Identifier: Apache-2.0

#ifndef SPARSE_DENOISE_PARALLEL_HPP
#define SPARSE_DENOISE_PARALLEL_HPP

#include <atomic>
#include <cstdint>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace sparse_denoise {

/// Resolves a requested thread count: 0 means "use hardware concurrency".
inline int resolve_threads(int requested) {
  if (requested > 0) return requested;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

/// Runs fn(i) for i in [begin, end) on up to `threads` workers.
///
/// Work items must be independent: each writes only to its own output slot,
/// so the result is identical for any thread count. Reductions that care
/// about summation order should run serially after this returns.
inline void parallel_for(std::int64_t begin, std::int64_t end,
                         const std::function<void(std::int64_t)>& fn,
                         int threads = 0) {
  const std::int64_t count = end - begin;
  if (count <= 0) return;
  const int workers = std::min<std::int64_t>(resolve_threads(threads), count);
  if (workers <= 1) {
    for (std::int64_t i = begin; i < end; ++i) fn(i);
    return;
  }

  std::atomic<std::int64_t> next{begin};
  std::atomic<bool> failed{false};
  std::exception_ptr first_error;
  std::mutex error_mutex;
  const std::int64_t chunk = std::max<std::int64_t>(1, count / (8 * workers));

  auto worker = [&]() {
    while (!failed.load(std::memory_order_relaxed)) {
      const std::int64_t lo = next.fetch_add(chunk);
      if (lo >= end) break;
      const std::int64_t hi = std::min(lo + chunk, end);
      try {
        for (std::int64_t i = lo; i < hi; ++i) fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
        failed.store(true, std::memory_order_relaxed);
        return;
      }
    }
  };

  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(workers));
  for (int t = 0; t < workers; ++t) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
  if (first_error) std::rethrow_exception(first_error);
}

}  // namespace sparse_denoise

#endif  // SPARSE_DENOISE_PARALLEL_HPP
