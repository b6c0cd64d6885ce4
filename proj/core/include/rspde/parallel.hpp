#pragma once

#include <cstddef>
#include <functional>
#include <span>

namespace rspde {

/// Worker count: RSPDE_THREADS when set to a positive integer, otherwise the
/// hardware concurrency (at least 1).
std::size_t worker_count();

/// Runs body(i) for i in [0, n). Indices are distributed over `workers`
/// threads (0 = worker_count()). Each index is visited exactly once; the
/// first exception thrown by any worker is rethrown after all workers join.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body,
                  std::size_t workers = 0);

/// Sum with a fixed binary reduction tree that depends only on values.size(),
/// so totals are bitwise reproducible regardless of how values were produced.
double pairwise_sum(std::span<const double> values);

}  // namespace rspde
