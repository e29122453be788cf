#pragma once

#include "wearsim/common.hpp"

#include <algorithm>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace wearsim {

/// Assembly thread count from WEARSIM_THREADS (default 1, the deterministic
/// reference mode).
inline int thread_count() {
  const char* env = std::getenv("WEARSIM_THREADS");
  if (!env) return 1;
  try {
    return std::clamp(std::stoi(env), 1, 256);
  } catch (const std::exception&) {
    return 1;
  }
}

/// Runs body(i) for i in [0, n). Each index is visited exactly once; callers
/// must write only to per-index storage.
template <class Body>
void parallel_for(Index n, Body&& body, int threads = thread_count()) {
  if (threads <= 1 || n < 2 * threads) {
    for (Index i = 0; i < n; ++i) body(i);
    return;
  }
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::jthread> pool;
  const Index chunk = (n + threads - 1) / threads;
  for (int t = 0; t < threads; ++t) {
    const Index lo = t * chunk, hi = std::min(n, lo + chunk);
    if (lo >= hi) break;
    pool.emplace_back([&, lo, hi] {
      try {
        for (Index i = lo; i < hi; ++i) body(i);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
      }
    });
  }
  pool.clear();
  if (error) std::rethrow_exception(error);
}

}  // namespace wearsim
