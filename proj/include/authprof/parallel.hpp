#pragma once

#include <cstddef>
#include <functional>

namespace authprof {

// Worker cap: min(hardware threads, PROFILER_THREADS when set). Always >= 1.
std::size_t worker_count();

// Runs fn(0..n-1) across workers. Each index must write only its own
// output slot; any exception is rethrown on the calling thread. Runs
// inline when n or the worker cap is 1.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

} // namespace authprof
