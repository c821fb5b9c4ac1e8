#pragma once

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <thread>
#include <utility>
#include <vector>

namespace anderson {

// Worker count resolution: explicit request > ANDERSON_WORKERS env > hardware.
inline int resolve_workers(int requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("ANDERSON_WORKERS")) {
    int v = std::atoi(env);
    if (v > 0) return v;
  }
  unsigned hw = std::thread::hardware_concurrency();
  return hw ? static_cast<int>(hw) : 1;
}

// Runs body(i) for i in [0, n) across a worker pool. Each index is processed
// exactly once; bodies must write only to per-index slots so results are
// independent of scheduling. The first exception is rethrown after join.
template <class F>
void parallel_for(long n, int workers, F&& body) {
  workers = resolve_workers(workers);
  if (workers <= 1 || n <= 1) {
    for (long i = 0; i < n; ++i) body(i);
    return;
  }
  std::atomic<long> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr first_error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  int count = static_cast<int>(std::min<long>(workers, n));
  pool.reserve(count);
  for (int w = 0; w < count; ++w) {
    pool.emplace_back([&] {
      for (;;) {
        long i = next.fetch_add(1);
        if (i >= n || failed.load()) return;
        try {
          body(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!first_error) first_error = std::current_exception();
          failed.store(true);
          return;
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

}  // namespace anderson
