#pragma once

#include <cstddef>
#include <exception>
#include <functional>
#include <vector>

namespace srblab::parallel {

// Process-wide worker count used by every parallel loop. 0 selects the
// hardware concurrency. Results never depend on this value: loops write to
// index-owned storage and reductions run in index order afterwards.
void set_worker_count(unsigned workers);
unsigned worker_count();

// Runs body(begin, end) over contiguous chunks covering [0, n). If any chunk
// throws, the exception of the lowest-indexed failing chunk is rethrown after
// all workers have joined.
void for_each_chunk(std::size_t n, std::size_t chunk,
                    const std::function<void(std::size_t, std::size_t)>& body);

template <class Fn>
void for_each_index(std::size_t n, Fn&& fn, std::size_t chunk = 64) {
  for_each_chunk(n, chunk, [&fn](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) fn(i);
  });
}

// Evaluates fn(i) for every i and returns the results in index order.
template <class T, class Fn>
std::vector<T> map_indices(std::size_t n, Fn&& fn, std::size_t chunk = 64) {
  std::vector<T> out(n);
  for_each_index(n, [&](std::size_t i) { out[i] = fn(i); }, chunk);
  return out;
}

// Scoped override of the worker count, mostly for tests.
class WorkerScope {
 public:
  explicit WorkerScope(unsigned workers) : previous_(worker_count()) { set_worker_count(workers); }
  ~WorkerScope() { set_worker_count(previous_); }
  WorkerScope(const WorkerScope&) = delete;
  WorkerScope& operator=(const WorkerScope&) = delete;

 private:
  unsigned previous_;
};

}  // namespace srblab::parallel
