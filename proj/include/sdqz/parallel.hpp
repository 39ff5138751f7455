#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace sdqz {

inline unsigned hardware_threads() {
  unsigned n = std::thread::hardware_concurrency();
  return n == 0 ? 1 : n;
}

inline std::size_t worker_count(std::size_t n, unsigned threads) {
  return n == 0 ? 0 : std::clamp<std::size_t>(threads, 1, n);
}

// Splits [0, n) into worker_count(n, threads) contiguous ranges and calls
// fn(worker, begin, end) once per range. Ranges depend on (n, threads) alone,
// so per-range output written to disjoint slots is deterministic. The first
// exception thrown by a worker is rethrown on the caller.
template <class Fn>
void parallel_for_workers(std::size_t n, unsigned threads, Fn&& fn) {
  std::size_t workers = worker_count(n, threads);
  if (workers == 0) return;
  if (workers == 1) {
    fn(std::size_t{0}, std::size_t{0}, n);
    return;
  }
  std::exception_ptr first_error;
  std::mutex error_mutex;
  {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
      std::size_t begin = n * w / workers;
      std::size_t end = n * (w + 1) / workers;
      pool.emplace_back([&, w, begin, end] {
        try {
          fn(w, begin, end);
        } catch (...) {
          std::lock_guard lock(error_mutex);
          if (!first_error) first_error = std::current_exception();
        }
      });
    }
  }
  if (first_error) std::rethrow_exception(first_error);
}

template <class Fn>
void parallel_for(std::size_t n, unsigned threads, Fn&& fn) {
  parallel_for_workers(n, threads,
                       [&](std::size_t, std::size_t begin, std::size_t end) { fn(begin, end); });
}

}  // namespace sdqz
