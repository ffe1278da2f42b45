#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "akmin/metrics.hpp"
#include "akmin/record.hpp"
#include "akmin/rng.hpp"
#include "akmin/runtime.hpp"

namespace akmin {

/// a x b grid of machines (a*b = t), row-major machine assignment.
/// S-tuples replicate along one row's columns, T-tuples along one
/// column's rows, so every (S row, T column) pair meets on exactly one
/// machine.
struct MachineMatrix {
  int a = 1;
  int b = 1;

  int machine_at(int i, int j) const { return (i - 1) * b + j; }
  std::vector<int> s_destinations(int i) const;  // machines of row i
  std::vector<int> t_destinations(int j) const;  // machines of column j
};

/// Picks (a, b) with a*b = t minimizing the replicated input volume
/// a*|T| + b*|S|; ties resolve to the smaller a.
MachineMatrix choose_matrix_dims(int t, std::uint64_t size_s,
                                 std::uint64_t size_t_);

/// Maps one tagged tuple to its machines: a uniform interval draw on the
/// tuple's own side, then the full row or column of the matrix.
std::vector<int> assign_tuple(const Record& record, const MachineMatrix& matrix,
                              Rng& rng);

struct JoinOptions {
  bool count_only = false;  // skip materializing output tuples
  int r = 1;                // statjoin statistics-sort sampling multiplier
};

struct JoinRun {
  MachineMatrix matrix;                          // randjoin
  std::vector<std::uint64_t> output_counts;      // per machine
  std::vector<std::vector<JoinedTuple>> parts;   // materialized mode
  std::uint64_t total_output = 0;                // W
  std::vector<std::uint64_t> input_records;      // per machine reduce input
  MinimalityReport report;
  std::vector<std::string> notes;
};

/// Single-round randomized skew join: map-side interval assignment with
/// replication, then a per-key cross product on every machine. The union
/// of the per-machine outputs is the exact join; each result pair is
/// produced by exactly one machine.
JoinRun randjoin(Cluster& cluster, std::vector<Record> s, std::vector<Record> t,
                 const JoinOptions& options = {});

}  // namespace akmin
