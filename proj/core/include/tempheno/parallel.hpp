#pragma once

#include <cstddef>
#include <functional>

namespace tempheno {

/// Worker cap: TEMPHENO_THREADS when set to a positive integer, otherwise the
/// hardware concurrency.
std::size_t worker_count();

/// Runs body(i) for i in [0, count) on up to worker_count() threads. Each index
/// is visited exactly once; callers write to disjoint slots and reduce in index
/// order afterwards, which keeps results independent of the thread count.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body,
                  std::size_t min_per_worker = 8);

}  // namespace tempheno
