#include "akmin/join_rand.hpp"

#include <algorithm>
#include <any>
#include <unordered_map>

#include "akmin/errors.hpp"

namespace akmin {

namespace {

struct TupleMsg {
  std::vector<TaggedRecord> tuples;
};

/// Per-(table, key) occurrence tagging so reduce-side grouping has a
/// deterministic total order.
std::vector<TaggedRecord> tag_table_tuples(std::vector<Record> records, int origin) {
  std::unordered_map<std::int64_t, std::uint64_t> seen_s, seen_t;
  std::vector<TaggedRecord> out;
  out.reserve(records.size());
  for (auto& rec : records) {
    if (rec.table == TableTag::none) {
      throw DataSpecError("join input tuple without a table tag");
    }
    auto& seen = rec.table == TableTag::s ? seen_s : seen_t;
    const std::uint64_t idx = seen[rec.key]++;
    out.push_back(TaggedRecord{CompositeKey{rec.key, origin, idx}, std::move(rec)});
  }
  return out;
}

bool reduce_order(const TaggedRecord& a, const TaggedRecord& b) {
  if (a.ck.key != b.ck.key) return a.ck.key < b.ck.key;
  if (a.rec.table != b.rec.table) return a.rec.table < b.rec.table;
  return a.ck < b.ck;
}

}  // namespace

std::vector<int> MachineMatrix::s_destinations(int i) const {
  std::vector<int> out;
  out.reserve(static_cast<std::size_t>(b));
  for (int j = 1; j <= b; ++j) out.push_back(machine_at(i, j));
  return out;
}

std::vector<int> MachineMatrix::t_destinations(int j) const {
  std::vector<int> out;
  out.reserve(static_cast<std::size_t>(a));
  for (int i = 1; i <= a; ++i) out.push_back(machine_at(i, j));
  return out;
}

MachineMatrix choose_matrix_dims(int t, std::uint64_t size_s,
                                 std::uint64_t size_t_) {
  if (t < 1) throw ConfigError("machine count must be >= 1");
  MachineMatrix best;
  std::uint64_t best_cost = ~std::uint64_t{0};
  for (int a = 1; a <= t; ++a) {
    if (t % a != 0) continue;
    const int b = t / a;
    const std::uint64_t cost = static_cast<std::uint64_t>(a) * size_t_ +
                               static_cast<std::uint64_t>(b) * size_s;
    if (cost < best_cost) {  // ascending a, so ties keep the smaller a
      best_cost = cost;
      best = MachineMatrix{a, b};
    }
  }
  return best;
}

std::vector<int> assign_tuple(const Record& record, const MachineMatrix& matrix,
                              Rng& rng) {
  switch (record.table) {
    case TableTag::s: {
      const int i = 1 + static_cast<int>(rng.bounded(static_cast<std::uint64_t>(matrix.a)));
      return matrix.s_destinations(i);
    }
    case TableTag::t: {
      const int j = 1 + static_cast<int>(rng.bounded(static_cast<std::uint64_t>(matrix.b)));
      return matrix.t_destinations(j);
    }
    case TableTag::none: break;
  }
  throw DataSpecError("cannot assign an untagged tuple");
}

JoinRun randjoin(Cluster& cluster, std::vector<Record> s, std::vector<Record> t,
                 const JoinOptions& options) {
  const int machines = cluster.size();
  const std::uint64_t size_s = s.size();
  const std::uint64_t size_t_ = t.size();
  for (const auto& rec : s) {
    if (rec.table != TableTag::s) throw DataSpecError("S input contains a non-S tuple");
  }
  for (const auto& rec : t) {
    if (rec.table != TableTag::t) throw DataSpecError("T input contains a non-T tuple");
  }

  JoinRun run;
  run.matrix = choose_matrix_dims(machines, size_s, size_t_);
  const MachineMatrix matrix = run.matrix;

  // Both tables scattered in contiguous blocks; S block then T block per
  // machine.
  {
    auto s_blocks = split_blocks(std::move(s), machines);
    auto t_blocks = split_blocks(std::move(t), machines);
    for (int id = 1; id <= machines; ++id) {
      const auto idx = static_cast<std::size_t>(id - 1);
      auto& dst = cluster.machine(id).store;
      dst = std::move(s_blocks[idx]);
      dst.insert(dst.end(), std::move_iterator(t_blocks[idx].begin()),
                 std::move_iterator(t_blocks[idx].end()));
    }
  }

  // Map round: interval draw per tuple, replicate to the row or column.
  RoundStats& r1 = cluster.execute_round([&](MachineIo& io) {
    std::vector<Record> local = std::move(io.store());
    io.store().clear();
    const std::uint64_t m_local = local.size();
    auto tagged = tag_table_tuples(std::move(local), io.id());
    std::vector<std::vector<TaggedRecord>> batches(static_cast<std::size_t>(machines));
    for (auto& tup : tagged) {
      const auto dests = assign_tuple(tup.rec, matrix, io.rng());
      for (std::size_t d = 0; d < dests.size(); ++d) {
        auto& batch = batches[static_cast<std::size_t>(dests[d] - 1)];
        if (d + 1 == dests.size()) {
          batch.push_back(std::move(tup));
        } else {
          batch.push_back(tup);
        }
      }
    }
    for (int dest = 1; dest <= machines; ++dest) {
      auto& batch = batches[static_cast<std::size_t>(dest - 1)];
      if (batch.empty()) continue;
      const std::uint64_t count = batch.size();
      io.send(dest, std::make_any<TupleMsg>(TupleMsg{std::move(batch)}), count);
    }
    io.note_processed(m_local);
  });
  r1.paper_round = 1;

  // Reduce round: per-key cross product in composite order.
  std::vector<std::uint64_t> outputs(static_cast<std::size_t>(machines), 0);
  std::vector<std::uint64_t> inputs(static_cast<std::size_t>(machines), 0);
  std::vector<std::vector<JoinedTuple>> parts(static_cast<std::size_t>(machines));
  RoundStats& r2 = cluster.execute_round([&](MachineIo& io) {
    std::vector<TaggedRecord> all;
    for (auto& msg : io.take_inbox()) {
      auto& data = std::any_cast<TupleMsg&>(msg.payload);
      all.insert(all.end(), std::move_iterator(data.tuples.begin()),
                 std::move_iterator(data.tuples.end()));
    }
    const auto idx = static_cast<std::size_t>(io.id() - 1);
    inputs[idx] = all.size();
    std::sort(all.begin(), all.end(), reduce_order);

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
  r2.paper_round = 1;
  r2.workload = outputs;

  run.output_counts = outputs;
  run.input_records = inputs;
  if (!options.count_only) run.parts = std::move(parts);
  for (auto w : outputs) run.total_output += w;

  AlgorithmTag tag;
  tag.algorithm = Algorithm::randjoin;
  tag.join_output = run.total_output;
  tag.sigma = size_s + size_t_ > 0
                  ? static_cast<double>(run.total_output) /
                        static_cast<double>(size_s + size_t_)
                  : 0.0;
  tag.expected_map_sent = static_cast<std::uint64_t>(matrix.b) * size_s +
                          static_cast<std::uint64_t>(matrix.a) * size_t_;
  tag.notes.emplace_back("matrix", std::to_string(matrix.a) + "x" + std::to_string(matrix.b));
  for (const auto& note : run.notes) tag.notes.emplace_back("note", note);
  run.report = build_report(cluster.round_log(), size_s + size_t_,
                            run.total_output, machines, tag);
  return run;
}

}  // namespace akmin
