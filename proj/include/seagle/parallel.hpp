#pragma once

#include <exception>
#include <functional>
#include <thread>
#include <vector>

namespace seagle {

/// Runs fn(i) for i in [0, n) on up to `jobs` threads (jobs <= 1 runs
/// inline). The caller is responsible for writing results into per-index
/// slots; reductions afterwards stay in index order so numbers do not depend
/// on the thread count. The first exception is rethrown on the caller.
void parallel_for_index(int n, int jobs, const std::function<void(int)>& fn);

int default_jobs();

}  // namespace seagle
