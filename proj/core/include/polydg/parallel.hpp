#pragma once

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace polydg {

/// Worker count used by the assembly loops (0 = hardware concurrency).
void set_worker_count(int n);
int worker_count();

/// Splits [0, n) into fixed-size batches, runs fn(begin, end) on the workers and returns the per-batch
/// results in batch order. The partition does not depend on the worker count, so ordered reductions are
/// bit-reproducible.
template <class Result, class Fn>
std::vector<Result> batched_map(int n, int batch_size, Fn&& fn) {
  const int nb = n <= 0 ? 0 : (n + batch_size - 1) / batch_size;
  std::vector<Result> results(static_cast<std::size_t>(nb));
  const int nw = std::min(worker_count(), nb);
  if (nw <= 1) {
    for (int b = 0; b < nb; ++b) results[static_cast<std::size_t>(b)] = fn(b * batch_size, std::min(n, (b + 1) * batch_size));
    return results;
  }
  std::atomic<int> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto work = [&] {
    for (int b = next++; b < nb; b = next++) {
      try {
        results[static_cast<std::size_t>(b)] = fn(b * batch_size, std::min(n, (b + 1) * batch_size));
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
      }
    }
  };
  std::vector<std::thread> threads;
  for (int w = 0; w < nw; ++w) threads.emplace_back(work);
  for (auto& t : threads) t.join();
  if (error) std::rethrow_exception(error);
  return results;
}

}  // namespace polydg
