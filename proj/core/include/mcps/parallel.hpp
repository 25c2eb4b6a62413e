#pragma once

#include <cstddef>
#include <functional>

namespace mcps {

/// Worker count used by internal loops. Defaults to 1; the CLI reads
/// MCPS_THREADS. Results never depend on this value.
void set_thread_count(int n);
int thread_count();

/// Runs body(i) for i in [0, n). Each index is handled by exactly one worker
/// and bodies must only write to slots owned by their index, so the outcome is
/// independent of scheduling.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace mcps
