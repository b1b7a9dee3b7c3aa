#pragma once

#include <cstddef>
#include <functional>

namespace freshness {

/// Worker count from FRESHNESS_WORKERS, else std::thread::hardware_concurrency.
std::size_t default_worker_count();

/// Runs task(i) for i in [0, count) on up to `workers` threads (0 means
/// default_worker_count()). Tasks must not share mutable state; the first
/// exception thrown by any task is rethrown after all workers join.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& task, std::size_t workers = 0);

} // namespace freshness
