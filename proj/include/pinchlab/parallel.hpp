#pragma once

#include <algorithm>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace pinchlab {

// Worker count: PINCHLAB_THREADS if set (min 1), else hardware concurrency.
inline int thread_budget() {
  if (const char* env = std::getenv("PINCHLAB_THREADS")) {
    int n = std::atoi(env);
    if (n >= 1) return n;
  }
  unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

// Runs fn(i) for i in [0, n). Work items must write to disjoint slots so the
// result is identical for any thread count. The first exception thrown by a
// work item is rethrown on the calling thread.
template <class Fn>
void parallel_for(int n, Fn&& fn) {
  int workers = std::min(thread_budget(), n);
  if (workers <= 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(workers);
  std::mutex failure_mutex;
  std::exception_ptr failure;
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([n, w, workers, &fn, &failure_mutex, &failure] {
      try {
        for (int i = w; i < n; i += workers) fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> hold(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

}  // namespace pinchlab
