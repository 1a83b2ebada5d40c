#pragma once

#include <cstddef>
#include <functional>

namespace gnnmerge {

/// Thread count for the embarrassingly parallel merge stages: the
/// GNNMERGE_THREADS environment variable when set, otherwise the available
/// hardware parallelism.
std::size_t merge_thread_count();

/// Runs fn(i) for i in [0, count) on up to num_threads threads with a static
/// partition. Tasks must write to disjoint state; results are then identical
/// for every thread count.
void parallel_for(std::size_t count, std::size_t num_threads,
                  const std::function<void(std::size_t)>& fn);

} // namespace gnnmerge
