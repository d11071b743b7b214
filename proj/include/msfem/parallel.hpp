#pragma once

#include <functional>

namespace msfem {

/// Runs fn(i) for i in [0, n) on up to `jobs` threads (jobs <= 0: hardware
/// concurrency). Iterations must be independent. The first exception thrown
/// by any iteration is rethrown after all threads have joined.
void parallel_for(int n, int jobs, const std::function<void(int)>& fn);

/// Thread count parallel_for would use for a given jobs value.
int resolve_jobs(int jobs);

}  // namespace msfem
