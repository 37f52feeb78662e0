#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace geolab {

inline unsigned resolve_threads(unsigned requested) {
  if (requested != 0) return requested;
  unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1u : hw;
}

// Calls fn(i) for i in [0, n) with dynamic scheduling. Results must be written to slot i
// by the caller so that output order never depends on the schedule.
template <class Fn>
void parallel_for(std::size_t n, unsigned threads, Fn&& fn, std::size_t grain = 1) {
  threads = std::max(1u, resolve_threads(threads));
  if (threads == 1 || n <= grain) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto worker = [&]() {
    try {
      for (;;) {
        std::size_t begin = next.fetch_add(grain);
        if (begin >= n) break;
        std::size_t end = std::min(n, begin + grain);
        for (std::size_t i = begin; i < end; ++i) fn(i);
      }
    } catch (...) {
      std::lock_guard<std::mutex> lock(error_mutex);
      if (!error) error = std::current_exception();
      next.store(n);
    }
  };
  std::vector<std::thread> pool;
  unsigned count = static_cast<unsigned>(std::min<std::size_t>(threads, (n + grain - 1) / grain));
  for (unsigned t = 0; t < count; ++t) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace geolab
