#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace lwb {

// Runs f(i) for i in [0, n) on up to `threads` workers. Each index writes its
// own slot, so results do not depend on the worker count. The first exception
// thrown is rethrown after all workers stop.
template <class F>
void parallel_for(std::uint64_t n, int threads, F&& f) {
  const auto workers = static_cast<std::uint64_t>(std::max(1, threads));
  if (workers == 1 || n < 2) {
    for (std::uint64_t i = 0; i < n; ++i) f(i);
    return;
  }
  std::atomic<std::uint64_t> next{0};
  std::atomic<bool> stop{false};
  std::exception_ptr err;
  std::mutex mu;
  auto run = [&] {
    while (!stop) {
      const auto i = next++;
      if (i >= n) return;
      try {
        f(i);
      } catch (...) {
        std::lock_guard lock(mu);
        if (!err) err = std::current_exception();
        stop = true;
      }
    }
  };
  std::vector<std::thread> pool;
  for (std::uint64_t w = 0; w < std::min(workers, n); ++w) pool.emplace_back(run);
  for (auto& t : pool) t.join();
  if (err) std::rethrow_exception(err);
}

}  // namespace lwb
