#include "akmin/sort_terasort.hpp"

#include <algorithm>
#include <any>
#include <unordered_map>

namespace akmin {

namespace {

struct SampleMsg {
  std::vector<CompositeKey> values;
};

struct BoundaryMsg {
  std::vector<CompositeKey> values;
};

struct DataMsg {
  std::vector<TaggedRecord> records;
};

struct TsScratch {
  std::vector<TaggedRecord> tagged;
};

/// Occurrence-counter tagging over an unsorted buffer. Produces the same
/// composite keys as a stable sort followed by tag_duplicates, without
/// reordering the records.
std::vector<TaggedRecord> tag_by_counter(std::vector<Record> records, int origin) {
  std::unordered_map<std::int64_t, std::uint64_t> seen;
  seen.reserve(records.size());
  std::vector<TaggedRecord> out;
  out.reserve(records.size());
  for (auto& rec : records) {
    const std::uint64_t idx = seen[rec.key]++;
    out.push_back(TaggedRecord{CompositeKey{rec.key, origin, idx}, std::move(rec)});
  }
  return out;
}

}  // namespace

std::vector<CompositeKey> pick_boundary_objects(
    std::span<const CompositeKey> sorted_samples, int t) {
  const std::uint64_t s = sorted_samples.size();
  if (s < static_cast<std::uint64_t>(t)) {
    throw ConfigError("need at least t samples to pick boundaries: s=" +
                      std::to_string(s) + ", t=" + std::to_string(t));
  }
  std::vector<CompositeKey> out;
  out.reserve(static_cast<std::size_t>(t) - 1);
  for (int i = 1; i <= t - 1; ++i) {
    const std::uint64_t pos =
        (static_cast<std::uint64_t>(i) * s + static_cast<std::uint64_t>(t) - 1) /
        static_cast<std::uint64_t>(t);
    out.push_back(sorted_samples[pos - 1]);
  }
  return out;
}

TerasortRun terasort(Cluster& cluster, std::vector<Record> input,
                     const TerasortOptions& options) {
  const int t = cluster.size();
  const std::uint64_t n = input.size();
  if (n == 0) throw ConfigError("cannot sort an empty dataset");
  const std::uint64_t c = terasort_sample_target(n, t);
  const std::uint64_t m_min = n / static_cast<std::uint64_t>(t);
  if (c > m_min) {
    throw ConfigError("sample target " + std::to_string(c) +
                      " exceeds the smallest partition " + std::to_string(m_min));
  }
  TerasortRun run;
  if (n < 4 * static_cast<std::uint64_t>(t)) {
    run.notes.push_back("n < 4t: the 5m+1 guarantee does not apply");
  }
  if (std::log(static_cast<double>(n) * t) >= static_cast<double>(t)) {
    run.notes.push_back("ln(nt) >= t: minimality analysis condition unmet");
  }
  scatter_blocks(cluster, std::move(input));

  // Round 1: tag duplicates, draw exactly c samples per machine, send to
  // machine 1.
  std::vector<std::vector<CompositeKey>> captured(
      options.capture_samples ? static_cast<std::size_t>(t) : 0);
  RoundStats& r1 = cluster.execute_round([&](MachineIo& io) {
    std::vector<Record> local = std::move(io.store());
    io.store().clear();
    const std::uint64_t m_local = local.size();
    auto tagged = tag_by_counter(std::move(local), io.id());
    std::vector<CompositeKey> keys;
    keys.reserve(tagged.size());
    for (const auto& rec : tagged) keys.push_back(rec.ck);
    auto samples = algorithm_s_sample(std::span<const CompositeKey>(keys), c, io.rng());
    if (options.capture_samples) {
      captured[static_cast<std::size_t>(io.id() - 1)] = samples;
    }
    io.send(1, std::make_any<SampleMsg>(SampleMsg{std::move(samples)}), c);
    io.scratch() = TsScratch{std::move(tagged)};
    io.note_processed(m_local);
  });
  r1.paper_round = 1;
  for (int id = 1; id <= t; ++id) {
    r1.workload[static_cast<std::size_t>(id - 1)] = r1.processed[static_cast<std::size_t>(id - 1)];
  }

  // Round 2: machine 1 sorts the sample set and broadcasts the boundary
  // objects.
  std::vector<CompositeKey> boundaries;
  RoundStats& r2 = cluster.execute_round([&](MachineIo& io) {
    if (io.id() != 1) return;
    std::vector<CompositeKey> pool;
    for (auto& msg : io.take_inbox()) {
      auto& sample = std::any_cast<SampleMsg&>(msg.payload);
      pool.insert(pool.end(), sample.values.begin(), sample.values.end());
    }
    std::sort(pool.begin(), pool.end());
    boundaries = pick_boundary_objects(pool, t);
    for (int dest = 1; dest <= t; ++dest) {
      io.send(dest, std::make_any<BoundaryMsg>(BoundaryMsg{boundaries}),
              static_cast<std::uint64_t>(t - 1));
    }
    io.note_processed(pool.size());
  });
  r2.paper_round = 2;
  r2.workload[0] = static_cast<std::uint64_t>(t) * c;

  // Round 3a: route over (b_{j-1}, b_j]; the implicit end sentinels are
  // minus/plus infinity.
  RoundStats& r3 = cluster.execute_round([&](MachineIo& io) {
    std::vector<CompositeKey> bounds;
    for (auto& msg : io.take_inbox()) {
      bounds = std::move(std::any_cast<BoundaryMsg&>(msg.payload).values);
    }
    auto& scratch = std::any_cast<TsScratch&>(io.scratch());
    std::vector<TaggedRecord> tagged = std::move(scratch.tagged);
    io.scratch().reset();
    const std::uint64_t m_local = tagged.size();

    std::vector<std::vector<TaggedRecord>> buckets(static_cast<std::size_t>(t));
    for (auto& rec : tagged) {
      const auto it = std::lower_bound(bounds.begin(), bounds.end(), rec.ck);
      const auto dest = static_cast<std::size_t>(it - bounds.begin());
      buckets[dest].push_back(std::move(rec));
    }
    for (int dest = 1; dest <= t; ++dest) {
      auto& bucket = buckets[static_cast<std::size_t>(dest - 1)];
      if (bucket.empty()) continue;
      const std::uint64_t count = bucket.size();
      io.send(dest, std::make_any<DataMsg>(DataMsg{std::move(bucket)}), count);
    }
    io.note_processed(m_local);
  });
  r3.paper_round = 3;

  // Round 3b: sort whatever arrived.
  RoundStats& r4 = cluster.execute_round([&](MachineIo& io) {
    std::vector<TaggedRecord> all;
    for (auto& msg : io.take_inbox()) {
      auto& data = std::any_cast<DataMsg&>(msg.payload);
      all.insert(all.end(), std::move_iterator(data.records.begin()),
                 std::move_iterator(data.records.end()));
    }
    std::sort(all.begin(), all.end(), tagged_less);
    auto& store = io.store();
    store.clear();
    store.reserve(all.size());
    for (auto& rec : all) store.push_back(std::move(rec.rec));
    io.note_processed(all.size());
  });
  r4.paper_round = 3;
  {
    auto& log = cluster.round_log();
    RoundStats& route = log[log.size() - 2];
    route.workload = route.received;
  }

  run.boundaries = std::move(boundaries);
  run.samples = std::move(captured);
  run.partitions.reserve(static_cast<std::size_t>(t));
  for (int id = 1; id <= t; ++id) {
    run.partitions.push_back(std::move(cluster.machine(id).store));
    cluster.machine(id).store.clear();
  }
  AlgorithmTag tag;
  tag.algorithm = Algorithm::terasort;
  tag.m = n / static_cast<std::uint64_t>(t);
  for (const auto& note : run.notes) tag.notes.emplace_back("note", note);
  run.report = build_report(cluster.round_log(), n, n, t, tag);
  return run;
}

}  // namespace akmin
