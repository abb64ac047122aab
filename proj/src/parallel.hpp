#pragma once

#include <cstddef>
#include <functional>
#include <thread>
#include <vector>

namespace igmd {

/// Worker-count policy: explicit requests are honored as-is, auto (0) stays
/// single-threaded for small workloads and is capped at 8.
inline unsigned effective_threads(unsigned requested, std::size_t work_items) {
  if (requested != 0) return requested;
  unsigned hw = std::thread::hardware_concurrency();
  if (work_items < std::size_t(1) << 16) return 1;
  return hw == 0 ? 1 : std::min(hw, 8u);
}

inline void run_workers(unsigned threads, const std::function<void(unsigned)>& body) {
  if (threads <= 1) {
    body(0);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (unsigned t = 0; t < threads; ++t) pool.emplace_back(body, t);
  for (auto& th : pool) th.join();
}

}  // namespace igmd
