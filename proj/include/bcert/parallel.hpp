#pragma once

#include <cstddef>
#include <functional>

namespace bcert {

// Worker count: BCERT_THREADS if set (>= 1), else hardware concurrency.
std::size_t thread_count();

// Runs body(i) for i in [0, n). Tasks are claimed dynamically; callers must
// write results into per-task slots so the outcome is schedule-independent.
// The first exception thrown by any task is rethrown after all workers stop.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace bcert
