#pragma once

#include <cstddef>
#include <functional>

namespace ouhyper {

/// Worker count: requested when > 0, else hardware concurrency, always
/// capped by the OU_HYPER_THREADS environment variable when it is set.
int worker_count(int requested = 0);

/// Calls body(i) for i in [0, n) on up to `workers` threads. Each index is
/// visited exactly once; the first exception thrown is rethrown after all
/// workers have joined.
void parallel_for(std::size_t n, int workers, const std::function<void(std::size_t)>& body);

}  // namespace ouhyper
