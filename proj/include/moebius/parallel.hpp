#pragma once

// Minimal fork-join helper. Work is split into contiguous index blocks; callers
// write per-index results into preallocated slots and reduce them afterwards in
// index order, so floating point results never depend on the thread count.

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace moebius {

namespace detail {
inline std::atomic<int>& thread_setting() {
  static std::atomic<int> value{0};
  return value;
}
}  // namespace detail

/// 0 restores the default (MOEBIUS_THREADS, else 1).
inline void set_num_threads(int n) { detail::thread_setting().store(std::max(0, n)); }

inline int num_threads() {
  int n = detail::thread_setting().load();
  if (n > 0) return n;
  if (const char* env = std::getenv("MOEBIUS_THREADS")) {
    int v = std::atoi(env);
    if (v > 0) return v;
  }
  return 1;
}

template <class Fn>
void parallel_for(std::size_t n, Fn&& fn) {
  const std::size_t workers = std::min<std::size_t>(static_cast<std::size_t>(num_threads()), n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    const std::size_t begin = n * w / workers;
    const std::size_t end = n * (w + 1) / workers;
    pool.emplace_back([&, begin, end] {
      try {
        for (std::size_t i = begin; i < end; ++i) fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

/// Sum of fn(i) over [0, n), reduced in index order.
template <class Fn>
double parallel_sum(std::size_t n, Fn&& fn) {
  std::vector<double> rows(n, 0.0);
  parallel_for(n, [&](std::size_t i) { rows[i] = fn(i); });
  double total = 0.0;
  for (double r : rows) total += r;
  return total;
}

}  // namespace moebius
