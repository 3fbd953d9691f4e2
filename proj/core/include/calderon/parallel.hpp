#pragma once

#include <cstddef>
#include <functional>

namespace calderon {

/// Worker count used by node loops and study cells (default 1; 0 means
/// hardware concurrency).
void set_thread_count(int threads);
int thread_count();

/// Runs body(i) for i in [0, count) on contiguous static chunks. Each
/// index must write only its own outputs; reductions stay with the caller
/// so results do not depend on the partition.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

}  // namespace calderon
