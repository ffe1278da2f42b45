#pragma once

#include <any>
#include <cstdint>
#include <functional>
#include <vector>

#include "akmin/record.hpp"
#include "akmin/rng.hpp"

namespace akmin {

/// One inter-machine message. The payload is algorithm-defined; `records`
/// is the sender-declared record count the runtime charges to N_i.
struct Message {
  int source = 0;
  std::uint64_t records = 0;
  std::any payload;
};

/// A machine's private state. `store` holds its record partition, `inbox`
/// the messages delivered at the previous barrier, and `scratch` is
/// algorithm-private local memory carried across rounds.
struct MachineState {
  int id = 0;
  std::vector<Record> store;
  std::vector<Message> inbox;
  std::any scratch;
  Rng rng;
};

/// Per-barrier accounting, one slot per machine (0-indexed by id-1).
/// sent/received/self_delivered are counted by the runtime in the round
/// the send happens (conservation: sum sent == sum received). processed
/// is reported by the machine program; paper_round and workload are
/// assigned by the algorithm driving the cluster.
struct RoundStats {
  int index = 0;        // barrier index, 1-based
  int paper_round = 0;  // algorithm round the barrier belongs to
  std::vector<std::uint64_t> sent;
  std::vector<std::uint64_t> received;
  std::vector<std::uint64_t> self_delivered;
  std::vector<std::uint64_t> processed;
  std::vector<std::uint64_t> workload;

  std::uint64_t total_sent() const;
  std::uint64_t total_received() const;
};

/// Handed to a machine program for one round. Programs may mutate their
/// store and scratch, read the inbox, draw from their own rng stream, and
/// emit messages; nothing else is observable.
class MachineIo {
 public:
  MachineIo(int id, int t, std::vector<Record>& store,
            std::vector<Message>&& inbox, std::any& scratch, Rng& rng)
      : id_(id), t_(t), store_(store), inbox_(std::move(inbox)),
        scratch_(scratch), rng_(rng) {}

  int id() const { return id_; }
  int cluster_size() const { return t_; }
  std::vector<Record>& store() { return store_; }
  const std::vector<Message>& inbox() const { return inbox_; }
  std::vector<Message> take_inbox() { return std::move(inbox_); }
  std::any& scratch() { return scratch_; }
  Rng& rng() { return rng_; }

  /// Queues a message for `dest` (1..t, self allowed and counted). Throws
  /// RoutingError outside that range.
  void send(int dest, std::any payload, std::uint64_t records);

  void note_processed(std::uint64_t records) { processed_ += records; }

  struct Outgoing {
    int dest;
    Message msg;
  };
  std::vector<Outgoing>& outgoing() { return outgoing_; }
  std::uint64_t processed() const { return processed_; }

 private:
  int id_;
  int t_;
  std::vector<Record>& store_;
  std::vector<Message> inbox_;
  std::any& scratch_;
  Rng& rng_;
  std::vector<Outgoing> outgoing_;
  std::uint64_t processed_ = 0;
};

using Program = std::function<void(MachineIo&)>;

/// Simulated shared-nothing cluster of t machines executing synchronized
/// rounds. Machines exchange data only through runtime-delivered messages;
/// a barrier separates rounds, so no program observes data sent in its own
/// round. All randomness derives from (seed, machine id).
class Cluster {
 public:
  Cluster(int t, std::uint64_t seed);

  int size() const { return t_; }
  std::uint64_t seed() const { return seed_; }

  MachineState& machine(int id) { return machines_[static_cast<std::size_t>(id - 1)]; }
  const MachineState& machine(int id) const {
    return machines_[static_cast<std::size_t>(id - 1)];
  }

  /// Runs `program` on every machine against the pre-round snapshot, then
  /// delivers all queued messages (grouped by source id ascending, send
  /// order preserved) and appends a RoundStats entry.
  RoundStats& execute_round(const Program& program);

  const std::vector<RoundStats>& round_log() const { return round_log_; }
  std::vector<RoundStats>& round_log() { return round_log_; }
  RoundStats& last_round() { return round_log_.back(); }

 private:
  int t_;
  std::uint64_t seed_;
  std::vector<MachineState> machines_;
  std::vector<RoundStats> round_log_;
};

/// Splits `records` into t contiguous blocks, sizes as even as possible
/// (the first n mod t blocks take one extra).
std::vector<std::vector<Record>> split_blocks(std::vector<Record> records, int t);

/// Installs contiguous blocks of `records` as the machines' stores. Part
/// of run setup; not charged as network traffic.
void scatter_blocks(Cluster& cluster, std::vector<Record> records);

}  // namespace akmin
