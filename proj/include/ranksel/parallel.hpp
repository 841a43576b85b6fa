#pragma once

/// Deterministic parallel loops.
///
/// Work is cut into fixed-size blocks whose boundaries do not depend on the
/// thread count; each block's result lands in its own slot and the caller
/// folds the slots in block order.  Together with seed-keyed substreams this
/// makes every reduction bit-identical for any number of threads.

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace ranksel {

inline constexpr std::size_t kDefaultBlockSize = 2048;

/// Runs `block_fn(begin, end)` over [0, n) in fixed blocks and returns the
/// per-block results in block order.
template <class T, class BlockFn>
std::vector<T> parallel_blocks(std::size_t n, unsigned threads, BlockFn&& block_fn,
                               std::size_t block_size = kDefaultBlockSize) {
  const std::size_t blocks = (n + block_size - 1) / block_size;
  std::vector<T> out(blocks);
  if (blocks == 0) return out;
  const unsigned workers =
      static_cast<unsigned>(std::min<std::size_t>(std::max(1u, threads), blocks));

  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto worker = [&] {
    for (;;) {
      const std::size_t b = next.fetch_add(1);
      if (b >= blocks) return;
      try {
        const std::size_t begin = b * block_size;
        out[b] = block_fn(begin, std::min(n, begin + block_size));
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
        next.store(blocks);
      }
    }
  };

  if (workers == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (unsigned i = 0; i < workers; ++i) pool.emplace_back(worker);
  }
  if (error) std::rethrow_exception(error);
  return out;
}

/// Applies `fn(i)` to every index; results are stored by index.
template <class T, class Fn>
std::vector<T> parallel_map(std::size_t n, unsigned threads, Fn&& fn,
                            std::size_t block_size = 1) {
  std::vector<T> out(n);
  parallel_blocks<char>(
      n, threads,
      [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) out[i] = fn(i);
        return char{0};
      },
      block_size);
  return out;
}

}  // namespace ranksel
