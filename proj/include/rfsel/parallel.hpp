#pragma once

#include <cstddef>
#include <functional>

namespace rfsel {

// Number of worker threads used by parallel_for. Defaults to the hardware
// concurrency. Results never depend on this value.
void set_thread_count(std::size_t threads);
std::size_t thread_count();

// Runs body(i) for i in [0, count) on up to thread_count() workers. Each
// index is executed exactly once; the first exception thrown is rethrown
// after all workers finish.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

// Same, but body also receives a worker slot in [0, workers) so callers can
// keep per-worker scratch buffers.
void parallel_for_workers(std::size_t count,
                          const std::function<void(std::size_t worker, std::size_t i)>& body);
std::size_t worker_count(std::size_t count);

}  // namespace rfsel
