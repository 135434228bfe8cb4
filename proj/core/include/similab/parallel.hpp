#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace similab {

/// Paths are grouped in fixed-size blocks so reductions can be merged in block
/// order regardless of how many threads ran them.
inline constexpr std::size_t kPathBlock = 64;

inline std::size_t block_count(std::size_t n_items, std::size_t block = kPathBlock) {
  return (n_items + block - 1) / block;
}

/// Calls fn(begin, end, block_index) for every block of [0, n_items).  The
/// first exception thrown by any worker is rethrown on the calling thread.
template <class Fn>
void parallel_blocks(std::size_t n_items, unsigned threads, Fn&& fn, std::size_t block = kPathBlock) {
  const std::size_t nb = block_count(n_items, block);
  if (threads <= 1 || nb <= 1) {
    for (std::size_t b = 0; b < nb; ++b) fn(b * block, std::min(n_items, (b + 1) * block), b);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto worker = [&] {
    for (;;) {
      const std::size_t b = next.fetch_add(1);
      if (b >= nb) return;
      try {
        fn(b * block, std::min(n_items, (b + 1) * block), b);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
        next.store(nb);
      }
    }
  };
  std::vector<std::thread> pool;
  const unsigned n = std::min<std::size_t>(threads, nb);
  for (unsigned i = 0; i < n; ++i) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace similab
