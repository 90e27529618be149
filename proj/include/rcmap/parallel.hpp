#pragma once

#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace rcmap {

// Runs body(i) for i in [0, count) on up to `workers` threads. Work items
// must write only to their own index-keyed slots so results cannot depend on
// the schedule. The first exception wins and is rethrown after all threads
// drain.
template <class F>
void parallel_for(std::size_t count, int workers, F&& body) {
  if (count == 0) return;
  std::size_t nthreads =
      workers <= 1 ? 1 : std::min<std::size_t>(workers, count);
  if (nthreads == 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr first_error;
  std::mutex error_mu;
  auto run = [&]() {
    for (;;) {
      std::size_t i = next.fetch_add(1, std::memory_order_relaxed);
      if (i >= count) return;
      try {
        body(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mu);
        if (!first_error) first_error = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(nthreads);
  for (std::size_t t = 0; t < nthreads; ++t) pool.emplace_back(run);
  for (auto& th : pool) th.join();
  if (first_error) std::rethrow_exception(first_error);
}

}  // namespace rcmap
