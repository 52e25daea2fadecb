// Deterministic data parallelism: run fn(i) for i in [0, n) across a
// bounded thread pool.  Callers keep results deterministic by writing
// only to slot i; the schedule never feeds the same i twice.  The thread
// count is min(hardware, n, EXCERPTLAB_THREADS if set); EXCERPTLAB_THREADS=1
// forces serial execution.
#pragma once

#include <atomic>
#include <cstdlib>
#include <exception>
#include <string>
#include <thread>
#include <vector>

namespace excerptlab {

inline unsigned parallel_thread_count(std::size_t n) {
  unsigned hw = std::thread::hardware_concurrency();
  if (hw == 0) hw = 1;
  if (const char* env = std::getenv("EXCERPTLAB_THREADS")) {
    try {
      const long requested = std::stol(env);
      if (requested >= 1 && static_cast<unsigned long>(requested) < hw)
        hw = static_cast<unsigned>(requested);
    } catch (const std::exception&) {
      // Unparseable values fall back to the hardware count.
    }
  }
  if (n < hw) hw = static_cast<unsigned>(n);
  return hw == 0 ? 1 : hw;
}

template <typename Fn>
void parallel_for(std::size_t n, Fn&& fn) {
  if (n == 0) return;
  const unsigned threads = parallel_thread_count(n);
  if (threads <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::atomic<bool> failed{false};
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (unsigned t = 0; t < threads; ++t) {
    pool.emplace_back([&] {
      for (;;) {
        const std::size_t i = next.fetch_add(1);
        if (i >= n || failed.load()) return;
        try {
          fn(i);
        } catch (...) {
          if (!failed.exchange(true)) error = std::current_exception();
          return;
        }
      }
    });
  }
  for (std::thread& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace excerptlab
