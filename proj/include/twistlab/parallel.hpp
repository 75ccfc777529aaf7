#pragma once

#include <cstddef>
#include <functional>
#include <vector>

namespace twistlab {

/// Worker count: TWISTLAB_THREADS when set (>= 1), else hardware concurrency.
std::size_t worker_count();

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

/// Evaluates f(0..n-1) across workers; results are stored by index so any
/// reduction done afterwards is independent of the worker count.
template <typename T, typename F>
std::vector<T> parallel_map(std::size_t n, F&& f) {
  std::vector<T> out(n);
  parallel_for(n, [&](std::size_t i) { out[i] = f(i); });
  return out;
}

}  // namespace twistlab
