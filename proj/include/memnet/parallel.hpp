#pragma once

#include <algorithm>
#include <atomic>
#include <exception>
#include <thread>
#include <vector>

namespace memnet {

/// 0 means one thread per hardware core.
inline int resolve_threads(int threads) {
  if (threads > 0) return threads;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

/// Calls fn(i) for i in [0, n) on up to `threads` workers. Work items are
/// claimed dynamically; results must be written to slots indexed by i. The
/// exception from the lowest failing index is rethrown.
template <class Fn>
void parallel_for(int n, int threads, Fn&& fn) {
  const int workers = std::min(resolve_threads(threads), std::max(n, 1));
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(std::max(n, 0)));
  if (workers <= 1) {
    for (int i = 0; i < n; ++i) {
      try {
        fn(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  } else {
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w)
      pool.emplace_back([&] {
        for (int i = next++; i < n; i = next++) {
          try {
            fn(i);
          } catch (...) {
            errors[i] = std::current_exception();
          }
        }
      });
    for (auto& t : pool) t.join();
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace memnet
