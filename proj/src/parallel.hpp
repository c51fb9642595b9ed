#pragma once

#include <cstdint>
#include <functional>

namespace purelab {

// Runs task(begin, end) over contiguous chunks of [0, n) on `workers`
// threads. Chunk boundaries depend only on (n, workers), and callers must
// write results into per-index slots, so outputs cannot depend on scheduling.
// The first exception thrown by any chunk (lowest begin wins) is rethrown.
void parallel_for(std::int64_t n, int workers,
                  const std::function<void(std::int64_t, std::int64_t)>& task);

}  // namespace purelab
