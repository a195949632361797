#ifndef NAGNTK_LAB_POOL_H_
#define NAGNTK_LAB_POOL_H_

#include <cstddef>
#include <functional>

namespace nagntk::lab {

// Worker cap: `requested` if nonzero, else NAGNTK_WORKERS, else the hardware
// concurrency (at least 1).
std::size_t worker_count(std::size_t requested = 0);

// Runs job(0) .. job(count - 1) on up to `workers` threads. Jobs must not
// share mutable state. The first exception thrown by a job is rethrown after
// all threads finish.
void parallel_for(std::size_t count, std::size_t workers,
                  const std::function<void(std::size_t)>& job);

}  // namespace nagntk::lab

#endif  // NAGNTK_LAB_POOL_H_
