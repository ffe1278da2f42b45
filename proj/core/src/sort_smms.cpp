#include "akmin/sort_smms.hpp"

#include <algorithm>
#include <any>
#include <queue>

#include "akmin/errors.hpp"

namespace akmin {

namespace {

struct SampleMsg {
  std::vector<double> values;
};

struct BoundaryMsg {
  std::vector<double> values;
};

struct DataMsg {
  std::vector<TaggedRecord> records;
};

struct SmmsScratch {
  std::vector<TaggedRecord> tagged;
};

bool is_padding(const TaggedRecord& rec) { return rec.ck.key == kEmbedKeyLimit; }

/// k-way merge of per-source sorted runs by composite key.
std::vector<TaggedRecord> merge_streams(std::vector<std::vector<TaggedRecord>> streams) {
  struct Head {
    CompositeKey ck;
    std::size_t stream;
    std::size_t pos;
  };
  auto cmp = [](const Head& a, const Head& b) {
    return b.ck < a.ck;  // min-heap
  };
  std::priority_queue<Head, std::vector<Head>, decltype(cmp)> heap(cmp);
  std::size_t total = 0;
  for (std::size_t i = 0; i < streams.size(); ++i) {
    total += streams[i].size();
    if (!streams[i].empty()) heap.push(Head{streams[i][0].ck, i, 0});
  }
  std::vector<TaggedRecord> out;
  out.reserve(total);
  while (!heap.empty()) {
    const Head head = heap.top();
    heap.pop();
    out.push_back(std::move(streams[head.stream][head.pos]));
    const std::size_t next = head.pos + 1;
    if (next < streams[head.stream].size()) {
      heap.push(Head{streams[head.stream][next].ck, head.stream, next});
    }
  }
  return out;
}

}  // namespace

std::vector<double> sample_equidepth(std::span<const TaggedRecord> sorted_records,
                                     int s, int t) {
  const std::uint64_t m = sorted_records.size();
  if (s < 1) throw ConfigError("sample count s must be >= 1");
  if (m <= static_cast<std::uint64_t>(s)) {
    throw ConfigError("each machine must hold more records than samples: m=" +
                      std::to_string(m) + ", s=" + std::to_string(s));
  }
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(s) + 1);
  out.push_back(embed_composite(sorted_records[0].ck, t));
  for (int j = 1; j <= s; ++j) {
    // ceil(j*m/s)-th smallest, 1-based.
    const std::uint64_t pos =
        (static_cast<std::uint64_t>(j) * m + static_cast<std::uint64_t>(s) - 1) /
        static_cast<std::uint64_t>(s);
    out.push_back(embed_composite(sorted_records[pos - 1].ck, t));
  }
  for (std::size_t i = 1; i < out.size(); ++i) {
    if (!(out[i - 1] < out[i])) {
      throw ConfigError("equi-depth samples are not strictly increasing");
    }
  }
  return out;
}

BucketBoundaries compute_bucket_boundaries(const SampleSet& samples, int t,
                                           std::uint64_t m) {
  if (static_cast<int>(samples.per_machine.size()) != t) {
    throw ConfigError("sample set must cover all machines");
  }
  const int s = samples.s();
  if (s < 1) throw ConfigError("sample set needs at least two values per machine");
  for (const auto& vals : samples.per_machine) {
    if (static_cast<int>(vals.size()) != s + 1) {
      throw ConfigError("sample vectors must share one length");
    }
    for (std::size_t i = 1; i < vals.size(); ++i) {
      if (!(vals[i - 1] < vals[i])) {
        throw ConfigError("per-machine samples must be strictly increasing");
      }
    }
  }

  // Density of local interval [lambda_j, lambda_{j+1}) is (m/s) spread over
  // its width; zero after a machine's last sample.
  const double mass_per_interval =
      static_cast<double>(m) / static_cast<double>(s);
  auto mu = [&](int machine_idx, int j) -> double {
    const auto& vals = samples.per_machine[static_cast<std::size_t>(machine_idx)];
    if (j >= s) return 0.0;
    return mass_per_interval /
           (vals[static_cast<std::size_t>(j) + 1] - vals[static_cast<std::size_t>(j)]);
  };

  struct Event {
    double lambda;
    int machine;  // 0-based, tie-break
    int j;
  };
  auto later = [](const Event& a, const Event& b) {
    if (a.lambda != b.lambda) return a.lambda > b.lambda;
    return a.machine > b.machine;
  };
  std::priority_queue<Event, std::vector<Event>, decltype(later)> queue(later);
  std::vector<int> next(static_cast<std::size_t>(t), 1);
  std::vector<double> pastpdf(static_cast<std::size_t>(t), 0.0);
  for (int i = 0; i < t; ++i) {
    queue.push(Event{samples.per_machine[static_cast<std::size_t>(i)][0], i, 0});
  }

  BucketBoundaries out;
  out.values.reserve(static_cast<std::size_t>(t) + 1);
  const double target = static_cast<double>(m);
  double pdf = 0.0, pre = 0.0, cur = 0.0;
  double last_lambda = 0.0;

  while (!queue.empty()) {
    const Event ev = queue.top();
    queue.pop();
    ++out.sweep_events;
    last_lambda = ev.lambda;
    if (out.values.empty()) {
      out.values.push_back(ev.lambda);  // b_0 = global minimum sample
    }
    const double gained = (ev.lambda - pre) * pdf;
    if (gained + cur < target) {
      cur += gained;
    } else if (static_cast<int>(out.values.size()) <= t) {
      out.values.push_back((target - cur) / pdf + pre);
      cur = gained + cur - target;
    }
    pre = ev.lambda;
    pdf = pdf - pastpdf[static_cast<std::size_t>(ev.machine)] + mu(ev.machine, ev.j);
    pastpdf[static_cast<std::size_t>(ev.machine)] = mu(ev.machine, ev.j);
    if (next[static_cast<std::size_t>(ev.machine)] <= s) {
      const int j = next[static_cast<std::size_t>(ev.machine)]++;
      queue.push(Event{
          samples.per_machine[static_cast<std::size_t>(ev.machine)][static_cast<std::size_t>(j)],
          ev.machine, j});
    }
  }

  // b_t is pinned to the global maximum sample; rounding in the sweep may
  // leave it unemitted or slightly off.
  if (static_cast<int>(out.values.size()) == t) {
    out.values.push_back(last_lambda);
  } else if (static_cast<int>(out.values.size()) == t + 1) {
    out.values.back() = last_lambda;
  } else {
    throw ConfigError("sample mass inconsistent with machine count");
  }
  return out;
}

SmmsRun smms_sort(Cluster& cluster, std::vector<Record> input,
                  const SmmsOptions& options) {
  const int t = cluster.size();
  if (options.r < 1) throw ConfigError("sampling multiplier r must be >= 1");
  if (t > kEmbedMaxMachines) {
    throw ConfigError("smms supports at most 255 machines, got " + std::to_string(t));
  }
  const std::uint64_t n = input.size();
  for (const auto& rec : input) {
    if (rec.key >= kEmbedKeyLimit || rec.key <= -kEmbedKeyLimit) {
      throw ConfigError("smms keys must satisfy |key| < 2^24, got " +
                        std::to_string(rec.key));
    }
  }
  const std::uint64_t pad =
      (static_cast<std::uint64_t>(t) - n % static_cast<std::uint64_t>(t)) %
      static_cast<std::uint64_t>(t);
  for (std::uint64_t i = 0; i < pad; ++i) {
    input.push_back(Record{kEmbedKeyLimit, TableTag::none, std::string()});
  }
  const std::uint64_t m = input.size() / static_cast<std::uint64_t>(t);
  const int s = options.r * t;
  if (m <= static_cast<std::uint64_t>(s)) {
    throw ConfigError("need n/t > r*t records per machine: m=" + std::to_string(m) +
                      ", s=" + std::to_string(s));
  }
  scatter_blocks(cluster, std::move(input));

  // Round 1: local sort, composite tagging, equi-depth samples to machine 1.
  RoundStats& r1 = cluster.execute_round([&](MachineIo& io) {
    std::vector<Record> local = std::move(io.store());
    io.store().clear();
    std::stable_sort(local.begin(), local.end(),
                     [](const Record& a, const Record& b) { return a.key < b.key; });
    auto tagged = tag_duplicates(std::move(local), io.id());
    auto samples = sample_equidepth(tagged, s, t);
    io.send(1, std::make_any<SampleMsg>(SampleMsg{std::move(samples)}),
            static_cast<std::uint64_t>(s) + 1);
    io.scratch() = SmmsScratch{std::move(tagged)};
    io.note_processed(m);
  });
  r1.paper_round = 1;
  for (auto& w : r1.workload) w = m;

  // Round 2: machine 1 computes the global boundaries and broadcasts them.
  BucketBoundaries boundaries;
  RoundStats& r2 = cluster.execute_round([&](MachineIo& io) {
    if (io.id() != 1) return;
    SampleSet set;
    set.per_machine.resize(static_cast<std::size_t>(t));
    for (auto& msg : io.take_inbox()) {
      auto& sample = std::any_cast<SampleMsg&>(msg.payload);
      set.per_machine[static_cast<std::size_t>(msg.source - 1)] =
          std::move(sample.values);
    }
    boundaries = compute_bucket_boundaries(set, t, m);
    for (int dest = 1; dest <= t; ++dest) {
      io.send(dest, std::make_any<BoundaryMsg>(BoundaryMsg{boundaries.values}),
              static_cast<std::uint64_t>(t) + 1);
    }
    io.note_processed(static_cast<std::uint64_t>(t) *
                      (static_cast<std::uint64_t>(s) + 1));
  });
  r2.paper_round = 2;
  r2.workload[0] =
      static_cast<std::uint64_t>(t) * (static_cast<std::uint64_t>(s) + 1);

  // Round 3a: route each record to the bucket owner; interior boundaries
  // b_1..b_{t-1} bound half-open buckets, keys past b_t go to machine t.
  RoundStats& r3 = cluster.execute_round([&](MachineIo& io) {
    std::vector<double> bounds;
    for (auto& msg : io.take_inbox()) {
      bounds = std::move(std::any_cast<BoundaryMsg&>(msg.payload).values);
    }
    auto& scratch = std::any_cast<SmmsScratch&>(io.scratch());
    std::vector<TaggedRecord> tagged = std::move(scratch.tagged);
    io.scratch().reset();

    std::size_t begin = 0;
    int dest = 1;
    auto flush = [&](std::size_t end) {
      if (end == begin) return;
      std::vector<TaggedRecord> slice(
          std::move_iterator(tagged.begin() + static_cast<std::ptrdiff_t>(begin)),
          std::move_iterator(tagged.begin() + static_cast<std::ptrdiff_t>(end)));
      const std::uint64_t count = slice.size();
      io.send(dest, std::make_any<DataMsg>(DataMsg{std::move(slice)}), count);
      begin = end;
    };
    for (std::size_t i = 0; i < tagged.size(); ++i) {
      const double e = embed_composite(tagged[i].ck, t);
      int d = dest;
      while (d < t && e >= bounds[static_cast<std::size_t>(d)]) ++d;
      if (d != dest) {
        flush(i);
        dest = d;
      }
    }
    flush(tagged.size());
    io.note_processed(m);
  });
  r3.paper_round = 3;

  // Round 3b: t-way merge of the received sorted streams; padding records
  // are stripped and the plain records become the machine's partition.
  RoundStats& r4 = cluster.execute_round([&](MachineIo& io) {
    std::vector<std::vector<TaggedRecord>> streams;
    std::uint64_t received = 0;
    for (auto& msg : io.take_inbox()) {
      auto& data = std::any_cast<DataMsg&>(msg.payload);
      received += data.records.size();
      streams.push_back(std::move(data.records));
    }
    auto merged = merge_streams(std::move(streams));
    auto& store = io.store();
    store.clear();
    store.reserve(merged.size());
    for (auto& rec : merged) {
      if (!is_padding(rec)) store.push_back(std::move(rec.rec));
    }
    io.note_processed(received);
  });
  r4.paper_round = 3;
  {
    // Round-3 workload is the merge input, the quantity the bucket-density
    // guarantee bounds.
    auto& log = cluster.round_log();
    RoundStats& route = log[log.size() - 2];
    route.workload = route.received;
  }

  SmmsRun run;
  run.boundaries = std::move(boundaries);
  run.partitions.reserve(static_cast<std::size_t>(t));
  for (int id = 1; id <= t; ++id) {
    run.partitions.push_back(std::move(cluster.machine(id).store));
    cluster.machine(id).store.clear();
  }
  AlgorithmTag tag;
  tag.algorithm = Algorithm::smms;
  tag.r = options.r;
  tag.m = m;
  if (pad > 0) run.notes.push_back("padded " + std::to_string(pad) + " records");
  for (const auto& note : run.notes) tag.notes.emplace_back("note", note);
  run.report = build_report(cluster.round_log(), n, n, t, tag);
  return run;
}

}  // namespace akmin
