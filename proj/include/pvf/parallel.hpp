#pragma once

#include <Eigen/Core>

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace pvf {

/// Calls body(i) for i in [0, count) on up to `jobs` threads. Work items must
/// write only to their own slots; the first exception (by index) is rethrown.
template <class Body>
void parallel_for(Eigen::Index count, int jobs, Body&& body) {
  const auto workers = static_cast<Eigen::Index>(std::max(1, jobs));
  if (workers == 1 || count <= 1) {
    for (Eigen::Index i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<Eigen::Index> next{0};
  std::mutex guard;
  Eigen::Index failed_at = count;
  std::exception_ptr failure;
  auto worker = [&] {
    for (;;) {
      const Eigen::Index i = next.fetch_add(1);
      if (i >= count) return;
      try {
        body(i);
      } catch (...) {
        std::lock_guard lock(guard);
        if (i < failed_at) {
          failed_at = i;
          failure = std::current_exception();
        }
      }
    }
  };
  std::vector<std::jthread> threads;
  for (Eigen::Index t = 0; t < std::min(workers, count); ++t) threads.emplace_back(worker);
  threads.clear();
  if (failure) std::rethrow_exception(failure);
}

}  // namespace pvf
