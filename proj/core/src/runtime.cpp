#include "akmin/runtime.hpp"

#include <numeric>
#include <utility>

#include "akmin/errors.hpp"

namespace akmin {

std::uint64_t RoundStats::total_sent() const {
  return std::accumulate(sent.begin(), sent.end(), std::uint64_t{0});
}

std::uint64_t RoundStats::total_received() const {
  return std::accumulate(received.begin(), received.end(), std::uint64_t{0});
}

void MachineIo::send(int dest, std::any payload, std::uint64_t records) {
  if (dest < 1 || dest > t_) throw RoutingError(dest, t_);
  outgoing_.push_back(Outgoing{dest, Message{id_, records, std::move(payload)}});
}

Cluster::Cluster(int t, std::uint64_t seed) : t_(t), seed_(seed) {
  if (t < 1) throw ConfigError("cluster needs at least one machine");
  machines_.resize(static_cast<std::size_t>(t));
  for (int id = 1; id <= t; ++id) {
    MachineState& m = machines_[static_cast<std::size_t>(id - 1)];
    m.id = id;
    m.rng = Rng(seed, static_cast<std::uint64_t>(id));
  }
}

RoundStats& Cluster::execute_round(const Program& program) {
  RoundStats stats;
  stats.index = static_cast<int>(round_log_.size()) + 1;
  const auto n = static_cast<std::size_t>(t_);
  stats.sent.assign(n, 0);
  stats.received.assign(n, 0);
  stats.self_delivered.assign(n, 0);
  stats.processed.assign(n, 0);
  stats.workload.assign(n, 0);

  // Inboxes are consumed at round start; deliveries repopulate them at the
  // barrier, so no machine sees data sent in the current round.
  std::vector<std::vector<MachineIo::Outgoing>> staged(n);
  for (std::size_t i = 0; i < n; ++i) {
    MachineState& m = machines_[i];
    MachineIo io(m.id, t_, m.store, std::move(m.inbox), m.scratch, m.rng);
    m.inbox.clear();
    program(io);
    stats.processed[i] = io.processed();
    staged[i] = std::move(io.outgoing());
  }

  for (std::size_t i = 0; i < n; ++i) {
    for (auto& out : staged[i]) {
      const auto dest_idx = static_cast<std::size_t>(out.dest - 1);
      stats.sent[i] += out.msg.records;
      stats.received[dest_idx] += out.msg.records;
      if (dest_idx == i) stats.self_delivered[i] += out.msg.records;
      machines_[dest_idx].inbox.push_back(std::move(out.msg));
    }
  }

  round_log_.push_back(std::move(stats));
  return round_log_.back();
}

std::vector<std::vector<Record>> split_blocks(std::vector<Record> records, int t) {
  const auto blocks = static_cast<std::size_t>(t);
  const std::size_t n = records.size();
  const std::size_t base = n / blocks;
  const std::size_t extra = n % blocks;
  std::vector<std::vector<Record>> out(blocks);
  std::size_t pos = 0;
  for (std::size_t i = 0; i < blocks; ++i) {
    const std::size_t take = base + (i < extra ? 1 : 0);
    out[i].assign(std::move_iterator(records.begin() + static_cast<std::ptrdiff_t>(pos)),
                  std::move_iterator(records.begin() + static_cast<std::ptrdiff_t>(pos + take)));
    pos += take;
  }
  return out;
}

void scatter_blocks(Cluster& cluster, std::vector<Record> records) {
  auto blocks = split_blocks(std::move(records), cluster.size());
  for (int id = 1; id <= cluster.size(); ++id) {
    cluster.machine(id).store = std::move(blocks[static_cast<std::size_t>(id - 1)]);
  }
}

}  // namespace akmin
