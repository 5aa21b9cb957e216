#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

namespace blurbkit {

// Runs fn(shard, begin, end) over `shards` contiguous slices of [0, n) on up
// to `workers` threads. Shard boundaries depend only on n and shards, so
// callers that reduce per-shard results in shard order are deterministic.
template <typename Fn>
void run_sharded(std::size_t n, std::size_t shards, std::size_t workers, Fn&& fn) {
  shards = std::max<std::size_t>(1, std::min(shards, std::max<std::size_t>(n, 1)));
  const auto bounds = [&](std::size_t s) { return n * s / shards; };
  if (workers <= 1 || shards == 1) {
    for (std::size_t s = 0; s < shards; ++s) fn(s, bounds(s), bounds(s + 1));
    return;
  }
  std::vector<std::exception_ptr> errors(shards);
  std::vector<std::thread> threads;
  const std::size_t nthreads = std::min(workers, shards);
  threads.reserve(nthreads);
  for (std::size_t t = 0; t < nthreads; ++t) {
    threads.emplace_back([&, t] {
      for (std::size_t s = t; s < shards; s += nthreads) {
        try {
          fn(s, bounds(s), bounds(s + 1));
        } catch (...) {
          errors[s] = std::current_exception();
        }
      }
    });
  }
  for (auto& th : threads) th.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

}  // namespace blurbkit
