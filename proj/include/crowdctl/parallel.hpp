#pragma once

#include "crowdctl/types.hpp"

#include <functional>

namespace crowdctl {

/// Worker count from CROWDCTL_THREADS; 0 or unset means hardware concurrency.
unsigned thread_count();

/// Runs fn(0..n-1) over up to thread_count() threads. Results must be written
/// to per-index slots; the first exception thrown by any task is rethrown.
void parallel_for(Index n, const std::function<void(Index)>& fn);

}  // namespace crowdctl
