#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "akmin/metrics.hpp"
#include "akmin/record.hpp"
#include "akmin/runtime.hpp"

namespace akmin {

/// Equi-depth samples from all machines: per_machine[i-1] holds the s+1
/// strictly increasing embedded key values of machine i.
struct SampleSet {
  std::vector<std::vector<double>> per_machine;

  int s() const {
    return per_machine.empty() ? 0
                               : static_cast<int>(per_machine.front().size()) - 1;
  }
};

/// Global bucket boundaries b_0..b_t; bucket k owns [b_{k-1}, b_k), the
/// last bucket closes its upper end. sweep_events counts the handled
/// sample events, t*(s+1) for a well-formed input.
struct BucketBoundaries {
  std::vector<double> values;
  std::size_t sweep_events = 0;
};

struct SmmsOptions {
  int r = 1;  // sampling multiplier, s = r * t
};

struct SmmsRun {
  std::vector<std::vector<Record>> partitions;  // machine 1..t output
  BucketBoundaries boundaries;
  MinimalityReport report;
  std::vector<std::string> notes;
};

/// s+1 equi-depth samples of a key-sorted partition: the smallest key and
/// the ceil(j*m/s)-th smallest for j = 1..s, embedded into reals. Requires
/// m > s so the sample values are strictly increasing.
std::vector<double> sample_equidepth(std::span<const TaggedRecord> sorted_records,
                                     int s, int t);

/// Priority-queue sweep over the merged sample events. A running
/// piecewise-constant pdf accumulates estimated mass; a boundary is
/// interpolated each time the mass of the open bucket reaches m, so every
/// bucket's estimated density is m.
BucketBoundaries compute_bucket_boundaries(const SampleSet& samples, int t,
                                           std::uint64_t m);

/// Three-round deterministic parallel sort: local sort plus equi-depth
/// sampling, boundary computation on machine 1, boundary-directed
/// redistribution with a t-way merge. The concatenated partitions equal
/// the sequential sort of the input.
SmmsRun smms_sort(Cluster& cluster, std::vector<Record> input,
                  const SmmsOptions& options = {});

}  // namespace akmin
