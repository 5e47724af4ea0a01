#pragma once

#include <cstddef>
#include <functional>

namespace ellipsoid_lab {

/// Environment variable that overrides the worker count (0 = auto).
inline constexpr const char* kThreadsEnvVar = "ELLIPSOID_LAB_THREADS";

/// Worker count after applying ELLIPSOID_LAB_THREADS (which wins over
/// `requested` when set). 0 means std::thread::hardware_concurrency().
std::size_t resolve_worker_count(std::size_t requested);

/// Runs body(i) for i in [0, count) on up to `workers` threads. Jobs are
/// claimed from a shared counter, so completion order is unspecified;
/// callers write into preallocated slots indexed by i. The first exception
/// thrown by any job is rethrown after all workers join.
void parallel_for(std::size_t count, std::size_t workers, const std::function<void(std::size_t)>& body);

}  // namespace ellipsoid_lab
