#include "ddks/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace ddks {

namespace {

std::atomic<std::size_t> g_override{0};
thread_local bool t_in_parallel = false;

// Below this many elementary operations a parallel region is not worth it.
constexpr std::size_t kMinParallelWork = 1u << 16;

std::size_t env_workers() {
  static const std::size_t value = [] {
    if (const char* env = std::getenv("DDKS_THREADS")) {
      try {
        const long parsed = std::stol(env);
        if (parsed > 0) return static_cast<std::size_t>(parsed);
      } catch (...) {
      }
    }
    return std::max<std::size_t>(1, std::thread::hardware_concurrency());
  }();
  return value;
}

}  // namespace

std::size_t worker_count() {
  const std::size_t o = g_override.load(std::memory_order_relaxed);
  return o ? o : env_workers();
}

void set_worker_count(std::size_t n) { g_override.store(n, std::memory_order_relaxed); }

void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body) {
  const std::size_t workers = std::min(worker_count(), count);
  if (workers <= 1 || t_in_parallel) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }

  std::atomic<std::size_t> next{0};
  std::atomic<bool> stop{false};
  std::exception_ptr error;
  std::mutex error_mutex;

  auto run = [&] {
    t_in_parallel = true;
    while (!stop.load(std::memory_order_relaxed)) {
      const std::size_t i = next.fetch_add(1, std::memory_order_relaxed);
      if (i >= count) break;
      try {
        body(i);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
        stop = true;
      }
    }
    t_in_parallel = false;
  };

  std::vector<std::thread> pool;
  pool.reserve(workers - 1);
  for (std::size_t w = 1; w < workers; ++w) pool.emplace_back(run);
  run();
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

void parallel_for(std::size_t count, std::size_t work_per_item,
                  const std::function<void(std::size_t)>& body) {
  if (count * std::max<std::size_t>(work_per_item, 1) < kMinParallelWork) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  parallel_for(count, body);
}

}  // namespace ddks
