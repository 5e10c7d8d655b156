#pragma once

// Data-parallel loops over index ranges. Work is split into contiguous chunks
// and results are combined in chunk order, so the outcome never depends on the
// number of threads.

#include <algorithm>
#include <cstdint>
#include <exception>
#include <functional>
#include <thread>
#include <vector>

namespace qfib {

struct Parallelism {
  unsigned threads = 1;
};

namespace detail {

inline std::vector<std::pair<std::uint64_t, std::uint64_t>> split_range(std::uint64_t total,
                                                                        unsigned parts) {
  parts = std::max(1U, parts);
  if (total < parts) parts = static_cast<unsigned>(std::max<std::uint64_t>(total, 1));
  std::vector<std::pair<std::uint64_t, std::uint64_t>> ranges;
  const std::uint64_t chunk = total / parts;
  const std::uint64_t extra = total % parts;
  std::uint64_t begin = 0;
  for (unsigned i = 0; i < parts; ++i) {
    const std::uint64_t len = chunk + (i < extra ? 1 : 0);
    ranges.emplace_back(begin, begin + len);
    begin += len;
  }
  return ranges;
}

}  // namespace detail

/// Runs fn(begin, end) -> R on disjoint chunks of [0, total) and returns the
/// per-chunk results in chunk order.
template <typename R, typename Fn>
std::vector<R> parallel_map_ranges(std::uint64_t total, Parallelism par, Fn&& fn) {
  const auto ranges = detail::split_range(total, par.threads);
  std::vector<R> results(ranges.size());
  if (ranges.size() == 1) {
    results[0] = fn(ranges[0].first, ranges[0].second);
    return results;
  }
  std::vector<std::thread> workers;
  std::vector<std::exception_ptr> errors(ranges.size());
  workers.reserve(ranges.size());
  for (std::size_t i = 0; i < ranges.size(); ++i) {
    workers.emplace_back([&, i] {
      try {
        results[i] = fn(ranges[i].first, ranges[i].second);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    });
  }
  for (auto& w : workers) w.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return results;
}

template <typename Fn>
std::int64_t parallel_sum(std::uint64_t total, Parallelism par, Fn&& fn) {
  std::int64_t sum = 0;
  for (auto v : parallel_map_ranges<std::int64_t>(total, par, std::forward<Fn>(fn))) sum += v;
  return sum;
}

}  // namespace qfib
