#include "akmin/join_stat.hpp"

#include <algorithm>
#include <any>
#include <map>
#include <queue>
#include <unordered_map>

#include "akmin/errors.hpp"
#include "akmin/sort_smms.hpp"

namespace akmin {

namespace {

struct SampleMsg {
  TableTag table = TableTag::none;
  std::vector<double> values;
};

struct BoundaryMsg {
  std::vector<double> s_bounds;
  std::vector<double> t_bounds;
};

struct DataMsg {
  TableTag table = TableTag::none;
  std::vector<TaggedRecord> records;
};

struct StatEntry {
  std::int64_t key = 0;
  std::uint64_t count = 0;
  TableTag table = TableTag::none;
};

struct StatsMsg {
  std::vector<StatEntry> entries;
};

struct PlanMsg {
  std::vector<PlanRect> rects;
};

struct RoutedMsg {
  std::vector<TaggedRecord> tuples;
};

struct PreRouteScratch {
  std::vector<TaggedRecord> s_tagged;
  std::vector<TaggedRecord> t_tagged;
};

struct RunScratch {
  std::vector<RunTuple> s_run;
  std::vector<RunTuple> t_run;
};

/// Destination for a whole key group under the table's boundaries: one
/// plus the number of interior boundaries strictly below the key, so a key
/// equal to a boundary stays in the lower bucket.
int primary_dest(const std::vector<double>& interior, std::int64_t key) {
  const double k = static_cast<double>(key);
  const auto it = std::lower_bound(interior.begin(), interior.end(), k);
  return 1 + static_cast<int>(it - interior.begin());
}

std::vector<Record> pad_table(std::vector<Record> records, int t, TableTag tag) {
  const std::uint64_t n = records.size();
  const std::uint64_t pad =
      (static_cast<std::uint64_t>(t) - n % static_cast<std::uint64_t>(t)) %
      static_cast<std::uint64_t>(t);
  for (std::uint64_t i = 0; i < pad; ++i) {
    records.push_back(Record{kEmbedKeyLimit, tag, std::string()});
  }
  return records;
}

/// Sorted-run tuples with run-local ids; padding sentinels are dropped.
std::vector<RunTuple> to_run(std::vector<TaggedRecord> merged) {
  std::vector<RunTuple> out;
  out.reserve(merged.size());
  std::int64_t prev_key = 0;
  std::uint64_t next_id = 0;
  bool first = true;
  for (auto& rec : merged) {
    if (rec.ck.key == kEmbedKeyLimit) continue;
    if (first || rec.ck.key != prev_key) next_id = 0;
    prev_key = rec.ck.key;
    first = false;
    out.push_back(RunTuple{std::move(rec), next_id++});
  }
  return out;
}

std::vector<StatEntry> run_stats(const std::vector<RunTuple>& run, TableTag table) {
  std::vector<StatEntry> out;
  for (std::size_t i = 0; i < run.size();) {
    const std::int64_t key = run[i].rec.ck.key;
    std::size_t end = i;
    while (end < run.size() && run[end].rec.ck.key == key) ++end;
    out.push_back(StatEntry{key, end - i, table});
    i = end;
  }
  return out;
}

KeyStats assemble_stats(const std::vector<std::pair<int, StatEntry>>& entries) {
  std::map<std::int64_t, KeyCount> by_key;
  for (const auto& [source, entry] : entries) {
    KeyCount& kc = by_key[entry.key];
    kc.key = entry.key;
    if (entry.table == TableTag::s) {
      if (kc.holder_s != 0) throw PlanError("key run split across machines");
      kc.in_s = entry.count;
      kc.holder_s = source;
    } else {
      if (kc.holder_t != 0) throw PlanError("key run split across machines");
      kc.in_t = entry.count;
      kc.holder_t = source;
    }
  }
  KeyStats stats;
  stats.counts.reserve(by_key.size());
  for (auto& [key, kc] : by_key) {
    stats.total_result += kc.result_size();
    stats.counts.push_back(kc);
  }
  return stats;
}

struct TableParams {
  std::uint64_t m = 0;  // padded records per machine
  int s = 0;            // samples per machine minus one
};

/// Barriers 1-4: per-table local sort + sampling, per-table boundary
/// computation on machine 1, whole-key routing, merge with run ids and
/// statistics entries sent to machine 1.
void run_stats_pipeline(Cluster& cluster, std::vector<Record> s,
                        std::vector<Record> t_table, int r) {
  const int t = cluster.size();
  if (r < 1) throw ConfigError("sampling multiplier r must be >= 1");
  if (t > kEmbedMaxMachines) {
    throw ConfigError("statjoin supports at most 255 machines, got " +
                      std::to_string(t));
  }
  for (const auto* table : {&s, &t_table}) {
    for (const auto& rec : *table) {
      if (rec.key >= kEmbedKeyLimit || rec.key <= -kEmbedKeyLimit) {
        throw ConfigError("join keys must satisfy |key| < 2^24, got " +
                          std::to_string(rec.key));
      }
    }
  }
  s = pad_table(std::move(s), t, TableTag::s);
  t_table = pad_table(std::move(t_table), t, TableTag::t);
  TableParams ps{s.size() / static_cast<std::uint64_t>(t), r * t};
  TableParams pt{t_table.size() / static_cast<std::uint64_t>(t), r * t};
  for (const auto& p : {ps, pt}) {
    if (p.m <= static_cast<std::uint64_t>(p.s)) {
      throw ConfigError("need more than r*t records per machine per table: m=" +
                        std::to_string(p.m) + ", s=" + std::to_string(p.s));
    }
  }
  {
    auto s_blocks = split_blocks(std::move(s), t);
    auto t_blocks = split_blocks(std::move(t_table), t);
    for (int id = 1; id <= t; ++id) {
      const auto idx = static_cast<std::size_t>(id - 1);
      auto& dst = cluster.machine(id).store;
      dst = std::move(s_blocks[idx]);
      dst.insert(dst.end(), std::move_iterator(t_blocks[idx].begin()),
                 std::move_iterator(t_blocks[idx].end()));
    }
  }

  // Barrier 1: split by table, sort, tag, sample both tables to machine 1.
  RoundStats& b1 = cluster.execute_round([&](MachineIo& io) {
    std::vector<Record> local = std::move(io.store());
    io.store().clear();
    std::vector<Record> s_part, t_part;
    for (auto& rec : local) {
      (rec.table == TableTag::s ? s_part : t_part).push_back(std::move(rec));
    }
    const auto by_key = [](const Record& a, const Record& b) { return a.key < b.key; };
    std::stable_sort(s_part.begin(), s_part.end(), by_key);
    std::stable_sort(t_part.begin(), t_part.end(), by_key);
    PreRouteScratch scratch;
    scratch.s_tagged = tag_duplicates(std::move(s_part), io.id());
    scratch.t_tagged = tag_duplicates(std::move(t_part), io.id());
    auto s_samples = sample_equidepth(scratch.s_tagged, ps.s, t);
    auto t_samples = sample_equidepth(scratch.t_tagged, pt.s, t);
    io.send(1, std::make_any<SampleMsg>(SampleMsg{TableTag::s, std::move(s_samples)}),
            static_cast<std::uint64_t>(ps.s) + 1);
    io.send(1, std::make_any<SampleMsg>(SampleMsg{TableTag::t, std::move(t_samples)}),
            static_cast<std::uint64_t>(pt.s) + 1);
    io.note_processed(ps.m + pt.m);
    io.scratch() = std::move(scratch);
  });
  b1.paper_round = 1;
  for (auto& w : b1.workload) w = ps.m + pt.m;

  // Barrier 2: per-table bucket boundaries, broadcast together.
  RoundStats& b2 = cluster.execute_round([&](MachineIo& io) {
    if (io.id() != 1) return;
    SampleSet s_set, t_set;
    s_set.per_machine.resize(static_cast<std::size_t>(t));
    t_set.per_machine.resize(static_cast<std::size_t>(t));
    for (auto& msg : io.take_inbox()) {
      auto& sample = std::any_cast<SampleMsg&>(msg.payload);
      auto& set = sample.table == TableTag::s ? s_set : t_set;
      set.per_machine[static_cast<std::size_t>(msg.source - 1)] =
          std::move(sample.values);
    }
    BoundaryMsg bounds{compute_bucket_boundaries(s_set, t, ps.m).values,
                       compute_bucket_boundaries(t_set, t, pt.m).values};
    for (int dest = 1; dest <= t; ++dest) {
      io.send(dest, std::make_any<BoundaryMsg>(bounds),
              2 * (static_cast<std::uint64_t>(t) + 1));
    }
    io.note_processed(static_cast<std::uint64_t>(t) *
                      static_cast<std::uint64_t>(ps.s + pt.s + 2));
  });
  b2.paper_round = 1;

  // Barrier 3: whole key groups routed by primary key per table.
  RoundStats& b3 = cluster.execute_round([&](MachineIo& io) {
    std::vector<double> s_interior, t_interior;
    for (auto& msg : io.take_inbox()) {
      auto& bounds = std::any_cast<BoundaryMsg&>(msg.payload);
      auto strip = [](const std::vector<double>& b) {
        return std::vector<double>(b.begin() + 1, b.end() - 1);
      };
      s_interior = strip(bounds.s_bounds);
      t_interior = strip(bounds.t_bounds);
    }
    auto& scratch = std::any_cast<PreRouteScratch&>(io.scratch());
    auto route = [&](std::vector<TaggedRecord> tagged, TableTag table,
                     const std::vector<double>& interior) {
      std::vector<std::vector<TaggedRecord>> buckets(static_cast<std::size_t>(t));
      for (auto& rec : tagged) {
        const int dest = primary_dest(interior, rec.ck.key);
        buckets[static_cast<std::size_t>(dest - 1)].push_back(std::move(rec));
      }
      for (int dest = 1; dest <= t; ++dest) {
        auto& bucket = buckets[static_cast<std::size_t>(dest - 1)];
        if (bucket.empty()) continue;
        const std::uint64_t count = bucket.size();
        io.send(dest, std::make_any<DataMsg>(DataMsg{table, std::move(bucket)}), count);
      }
    };
    route(std::move(scratch.s_tagged), TableTag::s, s_interior);
    route(std::move(scratch.t_tagged), TableTag::t, t_interior);
    io.scratch().reset();
    io.note_processed(ps.m + pt.m);
  });
  b3.paper_round = 2;

  // Barrier 4: per-table merge, run ids, statistics to machine 1.
  RoundStats& b4 = cluster.execute_round([&](MachineIo& io) {
    std::vector<std::vector<TaggedRecord>> s_streams, t_streams;
    std::uint64_t received = 0;
    for (auto& msg : io.take_inbox()) {
      auto& data = std::any_cast<DataMsg&>(msg.payload);
      received += data.records.size();
      (data.table == TableTag::s ? s_streams : t_streams)
          .push_back(std::move(data.records));
    }
    auto merge = [](std::vector<std::vector<TaggedRecord>> streams) {
      std::vector<TaggedRecord> all;
      std::size_t total = 0;
      for (const auto& st : streams) total += st.size();
      all.reserve(total);
      for (auto& st : streams) {
        all.insert(all.end(), std::move_iterator(st.begin()),
                   std::move_iterator(st.end()));
      }
      std::sort(all.begin(), all.end(), tagged_less);
      return all;
    };
    RunScratch scratch;
    scratch.s_run = to_run(merge(std::move(s_streams)));
    scratch.t_run = to_run(merge(std::move(t_streams)));
    StatsMsg stats;
    auto s_entries = run_stats(scratch.s_run, TableTag::s);
    auto t_entries = run_stats(scratch.t_run, TableTag::t);
    stats.entries.reserve(s_entries.size() + t_entries.size());
    stats.entries.insert(stats.entries.end(), s_entries.begin(), s_entries.end());
    stats.entries.insert(stats.entries.end(), t_entries.begin(), t_entries.end());
    const std::uint64_t entry_count = stats.entries.size();
    io.send(1, std::make_any<StatsMsg>(std::move(stats)), entry_count);
    io.note_processed(received);
    io.scratch() = std::move(scratch);
  });
  b4.paper_round = 2;
  {
    auto& log = cluster.round_log();
    RoundStats& route = log[log.size() - 2];
    RoundStats& merge = log.back();
    merge.workload = route.received;
  }
}

}  // namespace

BigResultPlan plan_big_results(const KeyStats& stats, int t) {
  BigResultPlan out;
  out.loads.assign(static_cast<std::size_t>(t), 0);
  const std::uint64_t w = stats.total_result;
  if (w == 0) return out;

  std::vector<const KeyCount*> bigs;
  for (const auto& kc : stats.counts) {
    if (kc.result_size() * static_cast<std::uint64_t>(t) > w) bigs.push_back(&kc);
  }
  // Descending size for a reproducible plan; any order preserves the bound.
  std::sort(bigs.begin(), bigs.end(), [](const KeyCount* a, const KeyCount* b) {
    if (a->result_size() != b->result_size()) {
      return a->result_size() > b->result_size();
    }
    return a->key < b->key;
  });

  int next_machine = 1;
  for (const KeyCount* kc : bigs) {
    const std::uint64_t mn = kc->result_size();
    const bool split_s = kc->in_s >= kc->in_t;
    const std::uint64_t longer = split_s ? kc->in_s : kc->in_t;
    const std::uint64_t shorter = split_s ? kc->in_t : kc->in_s;
    std::uint64_t j = (mn * static_cast<std::uint64_t>(t) + w - 1) / w;
    if (longer < static_cast<std::uint64_t>(t)) out.lemma3_met = false;
    bool capped = false;
    if (j > longer) {
      j = longer;  // never split below one tuple per interval
      capped = true;
    }
    const bool exact = !capped && mn * static_cast<std::uint64_t>(t) == j * w;
    const std::uint64_t base = longer / j;
    const std::uint64_t extra = longer % j;
    std::uint64_t start = 0;
    for (std::uint64_t p = 0; p < j; ++p) {
      const std::uint64_t len = base + (p < extra ? 1 : 0);
      const std::uint64_t lo = start;
      const std::uint64_t hi = start + len - 1;
      start += len;
      const bool residual = !exact && !capped && p == j - 1;
      if (residual) {
        out.residuals.push_back(
            split_s ? PendingResult{kc->key, lo, hi, 0, shorter - 1}
                    : PendingResult{kc->key, 0, shorter - 1, lo, hi});
        continue;
      }
      if (next_machine > t) {
        throw PlanError("big results demand more machines than available");
      }
      const PlanRect rect =
          split_s ? PlanRect{kc->key, lo, hi, 0, shorter - 1, next_machine}
                  : PlanRect{kc->key, 0, shorter - 1, lo, hi, next_machine};
      out.loads[static_cast<std::size_t>(next_machine - 1)] += rect.size();
      out.rects.push_back(rect);
      ++next_machine;
    }
  }
  out.machines_used = next_machine - 1;
  return out;
}

JoinPlan plan_small_results(std::vector<PendingResult> smalls, BigResultPlan big,
                            int t) {
  JoinPlan out;
  out.rects = std::move(big.rects);
  if (big.loads.size() != static_cast<std::size_t>(t)) {
    big.loads.resize(static_cast<std::size_t>(t), 0);
  }
  out.planned_load = std::move(big.loads);
  out.lemma3_met = big.lemma3_met;
  out.big_machines_used = big.machines_used;

  smalls.insert(smalls.end(), big.residuals.begin(), big.residuals.end());
  std::sort(smalls.begin(), smalls.end(),
            [](const PendingResult& a, const PendingResult& b) {
              if (a.size() != b.size()) return a.size() > b.size();
              if (a.key != b.key) return a.key < b.key;
              if (a.lo_s != b.lo_s) return a.lo_s < b.lo_s;
              return a.lo_t < b.lo_t;
            });

  using Slot = std::pair<std::uint64_t, int>;  // (load, machine id)
  std::priority_queue<Slot, std::vector<Slot>, std::greater<>> heap;
  for (int id = 1; id <= t; ++id) {
    heap.push(Slot{out.planned_load[static_cast<std::size_t>(id - 1)], id});
  }
  for (const auto& pending : smalls) {
    auto [load, id] = heap.top();
    heap.pop();
    out.rects.push_back(PlanRect{pending.key, pending.lo_s, pending.hi_s,
                                 pending.lo_t, pending.hi_t, id});
    load += pending.size();
    out.planned_load[static_cast<std::size_t>(id - 1)] = load;
    heap.push(Slot{load, id});
  }
  return out;
}

JoinPlan make_join_plan(const KeyStats& stats, int t) {
  const std::uint64_t w = stats.total_result;
  std::vector<PendingResult> smalls;
  for (const auto& kc : stats.counts) {
    const std::uint64_t size = kc.result_size();
    if (size == 0) continue;
    if (size * static_cast<std::uint64_t>(t) > w) continue;  // handled as big
    smalls.push_back(PendingResult{kc.key, 0, kc.in_s - 1, 0, kc.in_t - 1});
  }
  return plan_small_results(std::move(smalls), plan_big_results(stats, t), t);
}

StatsCollection collect_statistics(Cluster& cluster, std::vector<Record> s,
                                   std::vector<Record> t, int r) {
  run_stats_pipeline(cluster, std::move(s), std::move(t), r);
  StatsCollection out;
  const int machines = cluster.size();
  out.s_runs.resize(static_cast<std::size_t>(machines));
  out.t_runs.resize(static_cast<std::size_t>(machines));
  std::vector<std::pair<int, StatEntry>> entries;
  for (int id = 1; id <= machines; ++id) {
    auto& scratch = std::any_cast<RunScratch&>(cluster.machine(id).scratch);
    for (const auto& entry : run_stats(scratch.s_run, TableTag::s)) {
      entries.emplace_back(id, entry);
    }
    for (const auto& entry : run_stats(scratch.t_run, TableTag::t)) {
      entries.emplace_back(id, entry);
    }
    out.s_runs[static_cast<std::size_t>(id - 1)] = scratch.s_run;
    out.t_runs[static_cast<std::size_t>(id - 1)] = scratch.t_run;
  }
  out.stats = assemble_stats(entries);
  return out;
}

StatJoinRun statjoin(Cluster& cluster, std::vector<Record> s,
                     std::vector<Record> t_table, const JoinOptions& options) {
  const int t = cluster.size();
  const std::uint64_t size_s = s.size();
  const std::uint64_t size_t_ = t_table.size();
  for (const auto& rec : s) {
    if (rec.table != TableTag::s) throw DataSpecError("S input contains a non-S tuple");
  }
  for (const auto& rec : t_table) {
    if (rec.table != TableTag::t) throw DataSpecError("T input contains a non-T tuple");
  }
  run_stats_pipeline(cluster, std::move(s), std::move(t_table), options.r);

  // Barrier 5: machine 1 computes the result-to-machine mapping from the
  // gathered statistics and ships each rectangle to the key's run holders.
  StatJoinRun run;
  KeyStats stats;
  JoinPlan plan;
  RoundStats& b5 = cluster.execute_round([&](MachineIo& io) {
    if (io.id() != 1) return;
    std::vector<std::pair<int, StatEntry>> entries;
    for (auto& msg : io.take_inbox()) {
      auto& stat = std::any_cast<StatsMsg&>(msg.payload);
      for (const auto& entry : stat.entries) entries.emplace_back(msg.source, entry);
    }
    stats = assemble_stats(entries);
    plan = make_join_plan(stats, t);

    std::unordered_map<std::int64_t, const KeyCount*> holders;
    holders.reserve(stats.counts.size());
    for (const auto& kc : stats.counts) holders.emplace(kc.key, &kc);
    std::vector<std::vector<PlanRect>> batches(static_cast<std::size_t>(t));
    for (const auto& rect : plan.rects) {
      const KeyCount* kc = holders.at(rect.key);
      batches[static_cast<std::size_t>(kc->holder_s - 1)].push_back(rect);
      if (kc->holder_t != kc->holder_s) {
        batches[static_cast<std::size_t>(kc->holder_t - 1)].push_back(rect);
      }
    }
    for (int dest = 1; dest <= t; ++dest) {
      auto& batch = batches[static_cast<std::size_t>(dest - 1)];
      if (batch.empty()) continue;
      const std::uint64_t count = batch.size();
      io.send(dest, std::make_any<PlanMsg>(PlanMsg{std::move(batch)}), count);
    }
    io.note_processed(entries.size());
  });
  b5.paper_round = 3;

  // Barrier 6: run holders replicate their tuples into the mapping
  // rectangles; a tuple inside several rectangles of one machine is sent
  // once.
  RoundStats& b6 = cluster.execute_round([&](MachineIo& io) {
    std::vector<PlanRect> rects;
    for (auto& msg : io.take_inbox()) {
      auto& plan_msg = std::any_cast<PlanMsg&>(msg.payload);
      rects.insert(rects.end(), plan_msg.rects.begin(), plan_msg.rects.end());
    }
    auto& scratch = std::any_cast<RunScratch&>(io.scratch());

    // key -> position of its run within the sorted local run vector
    auto index_runs = [](const std::vector<RunTuple>& run) {
      std::unordered_map<std::int64_t, std::pair<std::size_t, std::size_t>> idx;
      std::size_t i = 0;
      while (i < run.size()) {
        std::size_t end = i;
        const std::int64_t key = run[i].rec.ck.key;
        while (end < run.size() && run[end].rec.ck.key == key) ++end;
        idx.emplace(key, std::pair{i, end});
        i = end;
      }
      return idx;
    };
    const auto s_index = index_runs(scratch.s_run);
    const auto t_index = index_runs(scratch.t_run);

    // Per (key, side): merge the id intervals aimed at one machine before
    // emitting, so overlapping rectangles do not duplicate tuples.
    struct SideIntervals {
      std::map<int, std::vector<std::pair<std::uint64_t, std::uint64_t>>> by_machine;
    };
    std::map<std::int64_t, SideIntervals> s_wanted, t_wanted;
    for (const auto& rect : rects) {
      if (s_index.contains(rect.key)) {
        s_wanted[rect.key].by_machine[rect.machine].emplace_back(rect.lo_s, rect.hi_s);
      }
      if (t_index.contains(rect.key)) {
        t_wanted[rect.key].by_machine[rect.machine].emplace_back(rect.lo_t, rect.hi_t);
      }
    }

    std::vector<std::vector<TaggedRecord>> batches(static_cast<std::size_t>(t));
    auto emit = [&](const std::vector<RunTuple>& run,
                    const std::unordered_map<std::int64_t,
                                             std::pair<std::size_t, std::size_t>>& index,
                    std::map<std::int64_t, SideIntervals>& wanted) {
      for (auto& [key, sides] : wanted) {
        const auto [begin, end] = index.at(key);
        (void)end;
        for (auto& [machine, ivals] : sides.by_machine) {
          std::sort(ivals.begin(), ivals.end());
          std::uint64_t next_free = 0;
          for (const auto& [lo, hi] : ivals) {
            const std::uint64_t from = std::max(lo, next_free);
            if (from > hi) continue;  // fully covered already
            for (std::uint64_t id = from; id <= hi; ++id) {
              batches[static_cast<std::size_t>(machine - 1)].push_back(
                  run[begin + id].rec);
            }
            next_free = hi + 1;
          }
        }
      }
    };
    emit(scratch.s_run, s_index, s_wanted);
    emit(scratch.t_run, t_index, t_wanted);
    io.note_processed(scratch.s_run.size() + scratch.t_run.size());
    io.scratch().reset();

    for (int dest = 1; dest <= t; ++dest) {
      auto& batch = batches[static_cast<std::size_t>(dest - 1)];
      if (batch.empty()) continue;
      const std::uint64_t count = batch.size();
      io.send(dest, std::make_any<RoutedMsg>(RoutedMsg{std::move(batch)}), count);
    }
  });
  b6.paper_round = 3;

  // Barrier 7: cross product of the received tuples per key.
  const auto machines = static_cast<std::size_t>(t);
  std::vector<std::uint64_t> outputs(machines, 0);
  std::vector<std::uint64_t> inputs(machines, 0);
  std::vector<std::vector<JoinedTuple>> parts(machines);
  RoundStats& b7 = cluster.execute_round([&](MachineIo& io) {
    std::vector<TaggedRecord> all;
    for (auto& msg : io.take_inbox()) {
      auto& routed = std::any_cast<RoutedMsg&>(msg.payload);
      all.insert(all.end(), std::move_iterator(routed.tuples.begin()),
                 std::move_iterator(routed.tuples.end()));
    }
    const auto idx = static_cast<std::size_t>(io.id() - 1);
    inputs[idx] = all.size();
    std::sort(all.begin(), all.end(), [](const TaggedRecord& a, const TaggedRecord& b) {
      if (a.ck.key != b.ck.key) return a.ck.key < b.ck.key;
      if (a.rec.table != b.rec.table) return a.rec.table < b.rec.table;
      return a.ck < b.ck;
    });
    std::uint64_t produced = 0;
    auto& out = parts[idx];
    std::size_t pos = 0;
    while (pos < all.size()) {
      std::size_t end = pos;
      const std::int64_t key = all[pos].ck.key;
      while (end < all.size() && all[end].ck.key == key) ++end;
      std::size_t t_begin = pos;
      while (t_begin < end && all[t_begin].rec.table == TableTag::s) ++t_begin;
      const std::uint64_t ns = t_begin - pos;
      const std::uint64_t nt = end - t_begin;
      produced += ns * nt;
      if (!options.count_only && ns > 0 && nt > 0) {
        for (std::size_t a = pos; a < t_begin; ++a) {
          for (std::size_t b = t_begin; b < end; ++b) {
            out.push_back(JoinedTuple{key, all[a].rec.payload, all[b].rec.payload});
          }
        }
      }
      pos = end;
    }
    outputs[idx] = produced;
    io.note_processed(all.size() + produced);
  });
  b7.paper_round = 3;
  b7.workload = outputs;

  run.plan = std::move(plan);
  run.stats = std::move(stats);
  run.output_counts = outputs;
  run.input_records = inputs;
  if (!options.count_only) run.parts = std::move(parts);
  for (auto w : outputs) run.total_output += w;
  if (run.total_output != run.stats.total_result) {
    throw PlanError("generated join size " + std::to_string(run.total_output) +
                    " differs from the planned total " +
                    std::to_string(run.stats.total_result));
  }

  AlgorithmTag tag;
  tag.algorithm = Algorithm::statjoin;
  tag.r = options.r;
  tag.join_output = run.total_output;
  tag.sigma = size_s + size_t_ > 0
                  ? static_cast<double>(run.total_output) /
                        static_cast<double>(size_s + size_t_)
                  : 0.0;
  tag.lemma3_met = run.plan.lemma3_met;
  for (const auto& note : run.notes) tag.notes.emplace_back("note", note);
  run.report = build_report(cluster.round_log(), size_s + size_t_,
                            run.total_output, t, tag);
  return run;
}

}  // namespace akmin
