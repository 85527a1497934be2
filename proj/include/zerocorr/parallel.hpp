#pragma once

#include <cstddef>
#include <functional>

namespace zerocorr {

/// Worker count: ZEROCORR_THREADS if set to a positive integer, else all cores.
std::size_t worker_count();

/// Runs task(i) for i in [0, count) on up to worker_count() threads. Tasks must
/// write only to their own slot; callers merge slots in index order afterwards,
/// which keeps results independent of the number of workers.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& task);

}  // namespace zerocorr
