#pragma once

#include <atomic>
#include <cstdint>
#include <thread>
#include <vector>

namespace primespan {

inline int default_threads() {
  unsigned n = std::thread::hardware_concurrency();
  return n ? static_cast<int>(n) : 1;
}

// Runs fn(block_index, lo, hi) over fixed-size blocks of [lo, hi).
// Block boundaries depend only on block_size, never on the thread count,
// so any commutative merge of per-block results is reproducible.
template <class Fn>
void parallel_blocks(uint64_t lo, uint64_t hi, int threads, uint64_t block_size,
                     Fn&& fn) {
  if (hi <= lo) return;
  if (block_size == 0) block_size = 1;
  uint64_t nblocks = (hi - lo + block_size - 1) / block_size;
  if (threads <= 1 || nblocks == 1) {
    for (uint64_t b = 0; b < nblocks; ++b) {
      uint64_t blo = lo + b * block_size;
      uint64_t bhi = blo + block_size < hi ? blo + block_size : hi;
      fn(b, blo, bhi);
    }
    return;
  }
  std::atomic<uint64_t> next{0};
  auto worker = [&] {
    for (;;) {
      uint64_t b = next.fetch_add(1, std::memory_order_relaxed);
      if (b >= nblocks) return;
      uint64_t blo = lo + b * block_size;
      uint64_t bhi = blo + block_size < hi ? blo + block_size : hi;
      fn(b, blo, bhi);
    }
  };
  std::vector<std::thread> pool;
  int use = threads < static_cast<int>(nblocks) ? threads : static_cast<int>(nblocks);
  pool.reserve(use);
  for (int i = 0; i < use; ++i) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
}

}  // namespace primespan
