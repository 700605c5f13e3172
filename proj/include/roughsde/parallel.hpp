#pragma once

#include <cstddef>
#include <functional>

namespace roughsde {

// Worker count: ROUGH_SDE_THREADS env var if set (clamped to [1, hw]),
// otherwise the OpenMP default. 1 when built without OpenMP.
int thread_count();

// Runs fn(i) for i in [0, count) across threads. Each index writes only its
// own output slot, so results are bitwise independent of the schedule; any
// reduction over the slots must happen afterwards in fixed index order.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& fn);

}  // namespace roughsde
