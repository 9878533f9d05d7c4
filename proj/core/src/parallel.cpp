#include "molkd/parallel.hpp"

#include <algorithm>
#include <cstdlib>
#include <string>
#include <thread>
#include <vector>

namespace molkd {

int effective_threads(int requested) {
  int n = std::max(1, requested);
  if (const char* cap_text = std::getenv("MOLKD_THREADS")) {
    const int cap = std::atoi(cap_text);
    if (cap >= 1) n = std::min(n, cap);
  }
  const int hw = static_cast<int>(std::thread::hardware_concurrency());
  if (hw >= 1) n = std::min(n, hw);
  return n;
}

void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& fn) {
  const int workers = std::min<int>(std::max(1, threads), n == 0 ? 1 : static_cast<int>(n));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(workers));
  const std::size_t chunk = (n + static_cast<std::size_t>(workers) - 1) /
                            static_cast<std::size_t>(workers);
  for (int w = 0; w < workers; ++w) {
    const std::size_t begin = static_cast<std::size_t>(w) * chunk;
    const std::size_t end = std::min(n, begin + chunk);
    if (begin >= end) break;
    pool.emplace_back([begin, end, &fn] {
      for (std::size_t i = begin; i < end; ++i) fn(i);
    });
  }
  for (std::thread& t : pool) t.join();
}

}  // namespace molkd
