#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace phaseflow {

/// Number of worker threads used by fan-out helpers when the caller passes 0.
inline unsigned default_parallelism() {
  return std::max(1u, std::thread::hardware_concurrency());
}

/// Evaluates fn(i) for i in [0, n) on up to `threads` workers. Results land in
/// slot i, so the output is independent of scheduling. The first exception
/// thrown by any task is rethrown after all workers join.
template <typename Result, typename Fn>
std::vector<Result> parallel_map(std::size_t n, unsigned threads, Fn&& fn) {
  std::vector<Result> out(n);
  if (threads == 0) threads = default_parallelism();
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, n));
  if (threads <= 1) {
    for (std::size_t i = 0; i < n; ++i) out[i] = fn(i);
    return out;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::jthread> workers;
  workers.reserve(threads);
  for (unsigned w = 0; w < threads; ++w) {
    workers.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) {
        try {
          out[i] = fn(i);
        } catch (...) {
          std::lock_guard lock(error_mutex);
          if (!error) error = std::current_exception();
        }
      }
    });
  }
  workers.clear();
  if (error) std::rethrow_exception(error);
  return out;
}

}  // namespace phaseflow
