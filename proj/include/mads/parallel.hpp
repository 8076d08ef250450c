#pragma once

// Thread helper for embarrassingly parallel index loops. Each index writes its
// own slot, so results are bitwise independent of the thread count. MADS_THREADS
// bounds the worker count (default: hardware concurrency).

#include <cstdlib>
#include <thread>
#include <vector>

namespace mads {

inline unsigned max_threads() {
  if (const char* env = std::getenv("MADS_THREADS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v >= 1) return static_cast<unsigned>(v);
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : hw;
}

template <typename Fn>
void parallel_for(std::size_t n, Fn&& fn) {
  const std::size_t workers = std::min<std::size_t>(max_threads(), n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([=] {
      for (std::size_t i = w; i < n; i += workers) fn(i);
    });
  }
  for (auto& t : pool) t.join();
}

}  // namespace mads
