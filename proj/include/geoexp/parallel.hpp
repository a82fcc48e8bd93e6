#pragma once

#include <cstddef>
#include <functional>

namespace geoexp {

/// Upper bound on worker threads for library loops; 0 means hardware concurrency.
/// Reads GEOEXP_THREADS once when never set explicitly.
void set_thread_limit(int threads);
int thread_limit();

/// Runs body(i) for i in [0, count). Each index is processed exactly once; results
/// must be written to per-index slots so the outcome is independent of scheduling.
/// The first exception thrown by any body is rethrown after all workers join.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

} // namespace geoexp
