#include "srblab/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <thread>

namespace srblab::parallel {
namespace {

std::atomic<unsigned> g_workers{1};
// Set on pool threads so nested loops run inline instead of spawning more.
thread_local bool t_inside_pool = false;

}  // namespace

void set_worker_count(unsigned workers) {
  if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
  g_workers.store(workers, std::memory_order_relaxed);
}

unsigned worker_count() { return g_workers.load(std::memory_order_relaxed); }

void for_each_chunk(std::size_t n, std::size_t chunk,
                    const std::function<void(std::size_t, std::size_t)>& body) {
  if (n == 0) return;
  chunk = std::max<std::size_t>(chunk, 1);
  const std::size_t chunks = (n + chunk - 1) / chunk;
  const unsigned workers =
      static_cast<unsigned>(std::min<std::size_t>(worker_count(), chunks));

  if (workers <= 1 || t_inside_pool) {
    body(0, n);
    return;
  }

  std::vector<std::exception_ptr> failures(chunks);
  std::atomic<std::size_t> next{0};
  auto drain = [&] {
    const bool was_inside = t_inside_pool;
    t_inside_pool = true;
    for (;;) {
      const std::size_t c = next.fetch_add(1, std::memory_order_relaxed);
      if (c >= chunks) {
        t_inside_pool = was_inside;
        return;
      }
      const std::size_t begin = c * chunk;
      const std::size_t end = std::min(n, begin + chunk);
      try {
        body(begin, end);
      } catch (...) {
        failures[c] = std::current_exception();
      }
    }
  };

  {
    std::vector<std::jthread> pool;
    pool.reserve(workers - 1);
    for (unsigned w = 1; w < workers; ++w) pool.emplace_back(drain);
    drain();
  }

  for (const auto& failure : failures) {
    if (failure) std::rethrow_exception(failure);
  }
}

}  // namespace srblab::parallel
