#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "akmin/errors.hpp"
#include "akmin/metrics.hpp"
#include "akmin/record.hpp"
#include "akmin/rng.hpp"
#include "akmin/runtime.hpp"

namespace akmin {

struct TerasortOptions {
  bool capture_samples = false;  // keep per-machine sample values in the run
};

struct TerasortRun {
  std::vector<std::vector<Record>> partitions;
  std::vector<CompositeKey> boundaries;              // b_1..b_{t-1}
  std::vector<std::vector<CompositeKey>> samples;    // when captured
  MinimalityReport report;
  std::vector<std::string> notes;
};

/// Sample size per machine for a Terasort run over n records and t machines.
inline std::uint64_t terasort_sample_target(std::uint64_t n, int t) {
  return static_cast<std::uint64_t>(
      std::ceil(std::log(static_cast<double>(n) * static_cast<double>(t))));
}

/// Sequential exact-count sampling: scans o_1..o_m once and selects o_k
/// with probability (target - selected) / (m - k + 1). Always returns
/// exactly `target` items and every item's inclusion probability is
/// target/m. The forced-take and quota-filled endpoints are integer
/// comparisons, so rounding cannot change the count.
template <typename T>
std::vector<T> algorithm_s_sample(std::span<const T> items, std::uint64_t target,
                                  Rng& rng) {
  const std::uint64_t m = items.size();
  if (target > m) {
    throw ConfigError("cannot sample " + std::to_string(target) + " of " +
                      std::to_string(m) + " records");
  }
  std::vector<T> out;
  out.reserve(target);
  for (std::uint64_t k = 0; k < m && out.size() < target; ++k) {
    const std::uint64_t needed = target - out.size();
    const std::uint64_t remaining = m - k;
    if (needed == remaining ||
        rng.uniform01() * static_cast<double>(remaining) <
            static_cast<double>(needed)) {
      out.push_back(items[k]);
    }
  }
  return out;
}

template <typename T>
std::vector<T> algorithm_s_sample(const std::vector<T>& items, std::uint64_t target,
                                  Rng& rng) {
  return algorithm_s_sample(std::span<const T>(items), target, rng);
}

/// Boundary objects from the sorted sample set: the ceil(i*s/t)-th smallest
/// sample for i = 1..t-1. Requires s >= t.
std::vector<CompositeKey> pick_boundary_objects(
    std::span<const CompositeKey> sorted_samples, int t);

/// Randomized 3-round sort: exact-count sampling to machine 1, boundary
/// objects broadcast, then routing over the left-open intervals
/// (b_{j-1}, b_j] followed by a local sort. Output equals the sequential
/// sort; per-machine load is bounded by 5m+1 with high probability.
TerasortRun terasort(Cluster& cluster, std::vector<Record> input,
                     const TerasortOptions& options = {});

}  // namespace akmin
