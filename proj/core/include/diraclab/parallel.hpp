#pragma once

#include <functional>
#include <vector>

namespace diraclab {

/// Worker count: DIRACLAB_THREADS env var, else hardware concurrency.
int thread_count();

/// Partitions [0, n) into contiguous slabs, one per worker.  Reductions over
/// slab partials are combined in slab order so results are deterministic for
/// a fixed slab count.
void parallel_for_slabs(std::size_t n, const std::function<void(std::size_t, std::size_t, int)>& body);

/// Deterministic parallel reduction: sums per-slab partial sums in slab order.
double parallel_reduce(std::size_t n,
                       const std::function<double(std::size_t, std::size_t)>& slab_sum);

}  // namespace diraclab
