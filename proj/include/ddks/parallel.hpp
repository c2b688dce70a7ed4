#pragma once

#include <cstddef>
#include <functional>

namespace ddks {

// Worker count: DDKS_THREADS if set and positive, else hardware concurrency.
std::size_t worker_count();

// Override for the current process (0 restores the environment default).
void set_worker_count(std::size_t n);

// Runs body(i) for i in [0, count). Iterations are handed out dynamically to
// up to worker_count() threads. Calls made from inside a running
// parallel_for execute serially on the calling thread, so library functions
// may nest freely. The first exception thrown by any iteration is rethrown
// after all workers stop.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

// Like parallel_for, but stays on the calling thread when the estimated
// amount of work is too small to pay for thread start-up.
void parallel_for(std::size_t count, std::size_t work_per_item,
                  const std::function<void(std::size_t)>& body);

}  // namespace ddks
