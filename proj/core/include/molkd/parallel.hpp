#pragma once

#include <cstddef>
#include <functional>

namespace molkd {

/// Clamp a requested worker count against hardware and the MOLKD_THREADS
/// environment cap. Requests < 1 mean 1.
int effective_threads(int requested);

/// Run fn(i) for i in [0, n) over `threads` workers with a static block
/// partition. Each index must write only its own output slot, so results
/// are independent of the worker count.
void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& fn);

}  // namespace molkd
