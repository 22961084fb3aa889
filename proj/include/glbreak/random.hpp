#pragma once

// Seed splitting and deterministic parallel loops.
//
// Every independent unit of Monte Carlo work (a simulated path, a
// replication) gets its own engine seeded from (master seed, counter), so
// results never depend on the number of worker threads.

#include <algorithm>
#include <cstdint>
#include <exception>
#include <mutex>
#include <random>
#include <thread>
#include <vector>

#include <boost/random/normal_distribution.hpp>

namespace glbreak {

using Engine = std::mt19937_64;

/// splitmix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

/// Seed of stream `index` under `master`. Nested splits compose: the seed of
/// replication r's path p is split_seed(split_seed(master, r), p).
constexpr std::uint64_t split_seed(std::uint64_t master, std::uint64_t index) noexcept {
  return mix64(mix64(master) ^ mix64(index + 0x632BE59BD9B4E019ULL));
}

inline Engine make_engine(std::uint64_t master, std::uint64_t index) {
  return Engine(split_seed(master, index));
}

/// Ziggurat standard normal.
using StandardNormal = boost::random::normal_distribution<double>;

/// Runs body(i) for i in [0, n) on up to `threads` workers. Work is chunked
/// statically; the caller writes results into slot i so the output does not
/// depend on scheduling. The first exception thrown by any worker is rethrown.
template <class Body>
void parallel_for(std::size_t n, unsigned threads, Body&& body) {
  if (threads <= 1 || n < 2) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  const std::size_t workers = std::min<std::size_t>(threads, n);
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (std::size_t i = w; i < n; i += workers) body(i);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace glbreak
