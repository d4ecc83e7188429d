#include "rfsel/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace rfsel {
namespace {

std::atomic<std::size_t> g_threads{0};

}  // namespace

void set_thread_count(std::size_t threads) { g_threads.store(threads); }

std::size_t thread_count() {
  std::size_t t = g_threads.load();
  if (t == 0) {
    t = std::max<std::size_t>(1, std::thread::hardware_concurrency());
  }
  return t;
}

std::size_t worker_count(std::size_t count) { return std::max<std::size_t>(1, std::min(thread_count(), count)); }

void parallel_for_workers(std::size_t count,
                          const std::function<void(std::size_t, std::size_t)>& body) {
  if (count == 0) return;
  const std::size_t workers = worker_count(count);
  if (workers == 1) {
    for (std::size_t i = 0; i < count; ++i) body(0, i);
    return;
  }

  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto run = [&](std::size_t worker) {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= count) return;
      try {
        body(worker, i);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
        next.store(count);
        return;
      }
    }
  };

  std::vector<std::jthread> pool;
  pool.reserve(workers - 1);
  for (std::size_t w = 1; w < workers; ++w) pool.emplace_back(run, w);
  run(0);
  pool.clear();
  if (error) std::rethrow_exception(error);
}

void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body) {
  parallel_for_workers(count, [&](std::size_t, std::size_t i) { body(i); });
}

}  // namespace rfsel
