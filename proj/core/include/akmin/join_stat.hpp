#pragma once

#include <cstdint>
#include <vector>

#include "akmin/join_rand.hpp"  // JoinOptions, JoinRun
#include "akmin/metrics.hpp"
#include "akmin/record.hpp"
#include "akmin/runtime.hpp"

namespace akmin {

/// Per-key tuple counts in both tables plus the machines holding the
/// sorted runs after statistics collection (0 when the key is absent from
/// that table).
struct KeyCount {
  std::int64_t key = 0;
  std::uint64_t in_s = 0;
  std::uint64_t in_t = 0;
  int holder_s = 0;
  int holder_t = 0;

  std::uint64_t result_size() const { return in_s * in_t; }
};

/// Exact join statistics: one entry per key, ascending, plus the total
/// join size W.
struct KeyStats {
  std::vector<KeyCount> counts;
  std::uint64_t total_result = 0;  // W
};

/// One result-to-machine mapping rectangle: within key's runs, S tuple ids
/// lo_s..hi_s (inclusive) crossed with T tuple ids lo_t..hi_t go to
/// `machine`.
struct PlanRect {
  std::int64_t key = 0;
  std::uint64_t lo_s = 0, hi_s = 0;
  std::uint64_t lo_t = 0, hi_t = 0;
  int machine = 0;

  std::uint64_t size() const { return (hi_s - lo_s + 1) * (hi_t - lo_t + 1); }
};

/// An unassigned result block: a whole small key result or the residual
/// rectangle of a big one.
struct PendingResult {
  std::int64_t key = 0;
  std::uint64_t lo_s = 0, hi_s = 0;
  std::uint64_t lo_t = 0, hi_t = 0;

  std::uint64_t size() const { return (hi_s - lo_s + 1) * (hi_t - lo_t + 1); }
};

struct BigResultPlan {
  std::vector<PlanRect> rects;
  std::vector<PendingResult> residuals;
  std::vector<std::uint64_t> loads;  // per machine planned output
  int machines_used = 0;
  bool lemma3_met = true;  // every big result had max(M,N) >= t
};

struct JoinPlan {
  std::vector<PlanRect> rects;
  std::vector<std::uint64_t> planned_load;
  bool lemma3_met = true;
  int big_machines_used = 0;
};

/// Rectangle partitioning of the big results (size > W/t). Each big result
/// of size MN with (j-1)W/t < MN <= jW/t splits its longer side into j
/// near-even intervals; on exact division all j rectangles take fresh
/// machines, otherwise the smallest becomes a residual for the small-result
/// pool. Bigs are processed in descending size, fresh machines assigned in
/// ascending id, at most one big rectangle per machine.
BigResultPlan plan_big_results(const KeyStats& stats, int t);

/// Greedy completion: small results (whole keys plus residuals) in
/// descending size order, each to the machine with the smallest planned
/// load, ties to the lowest id. The completed plan keeps every machine at
/// or below 2W/t whenever the big-result hypothesis held.
JoinPlan plan_small_results(std::vector<PendingResult> smalls, BigResultPlan big,
                            int t);

JoinPlan make_join_plan(const KeyStats& stats, int t);

/// A sorted run tuple with its id inside the key's run.
struct RunTuple {
  TaggedRecord rec;
  std::uint64_t run_id = 0;
};

struct StatsCollection {
  KeyStats stats;
  std::vector<std::vector<RunTuple>> s_runs;  // per machine, key-run sorted
  std::vector<std::vector<RunTuple>> t_runs;
};

/// Rounds 1-2 of the deterministic join: both tables parallel-sorted by
/// join key with whole key runs kept on single machines, per-key counts
/// gathered, run-local tuple ids assigned.
StatsCollection collect_statistics(Cluster& cluster, std::vector<Record> s,
                                   std::vector<Record> t, int r = 1);

struct StatJoinRun : JoinRun {
  JoinPlan plan;
  KeyStats stats;
};

/// Deterministic 3-round skew join: statistics collection over a parallel
/// sort, rectangle planning from exact counts, then plan-directed routing
/// and per-machine cross products. Per-machine generated output is at most
/// 2W/t whenever every big result satisfies max(M,N) >= t.
StatJoinRun statjoin(Cluster& cluster, std::vector<Record> s,
                     std::vector<Record> t, const JoinOptions& options = {});

}  // namespace akmin
