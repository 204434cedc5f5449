#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <type_traits>
#include <vector>

namespace ktrg {

// Evaluates f(0..n-1) on up to `workers` threads. Results come back in index
// order, so any later reduction is independent of scheduling.
template <class F>
auto parallel_map(std::size_t n, unsigned workers, F&& f) {
  using T = std::invoke_result_t<F&, std::size_t>;
  std::vector<T> out(n);
  unsigned width = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(n)));
  if (width <= 1) {
    for (std::size_t i = 0; i < n; ++i) out[i] = f(i);
    return out;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  {
    std::vector<std::jthread> pool;
    pool.reserve(width);
    for (unsigned w = 0; w < width; ++w) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < n; i = next++) {
          try {
            out[i] = f(i);
          } catch (...) {
            std::lock_guard lock(error_mutex);
            if (!error) error = std::current_exception();
          }
        }
      });
    }
  }
  if (error) std::rethrow_exception(error);
  return out;
}

}  // namespace ktrg
