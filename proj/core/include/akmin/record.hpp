#pragma once

#include <compare>
#include <cstdint>
#include <string>
#include <vector>

namespace akmin {

enum class TableTag : std::uint8_t { none = 0, s = 1, t = 2 };

/// The unit of every workload: an orderable 64-bit primary key, the table
/// the record belongs to (joins only), and an opaque payload of fixed
/// length per dataset.
struct Record {
  std::int64_t key = 0;
  TableTag table = TableTag::none;
  std::string payload;

  bool operator==(const Record&) const = default;
};

/// Joined output tuple: match key plus the payloads of both sides.
struct JoinedTuple {
  std::int64_t key = 0;
  std::string s_payload;
  std::string t_payload;

  auto operator<=>(const JoinedTuple&) const = default;
};

/// Globally unique object key for duplicate primary keys. Total order is
/// lexicographic (key, origin, index); projecting back to the primary key
/// preserves the order of distinct keys.
struct CompositeKey {
  std::int64_t key = 0;
  std::int32_t origin = 0;     // machine id the record was tagged on, 1..t
  std::uint64_t index = 0;     // position among equal keys on that machine

  auto operator<=>(const CompositeKey&) const = default;
};

struct TaggedRecord {
  CompositeKey ck;
  Record rec;
};

inline bool tagged_less(const TaggedRecord& a, const TaggedRecord& b) {
  return a.ck < b.ck;
}

// Composite keys embed injectively into doubles as key + frac, frac
// encoding (origin, index) with origin dominating. The budget below keeps
// the embedding exact-order: |key| <= 2^24, origin <= 255, index < 2^20
// fit a 52-bit mantissa. Padding records use kEmbedKeyLimit itself, data
// keys must stay strictly below it.
inline constexpr std::int64_t kEmbedKeyLimit = std::int64_t{1} << 24;
inline constexpr std::uint64_t kEmbedMaxRun = std::uint64_t{1} << 20;
inline constexpr int kEmbedMaxMachines = 255;

/// Order-preserving embedding of a composite key into a real value,
/// frac = (origin * 2^20 + index) / ((t + 1) * 2^20). Throws ConfigError
/// outside the validity budget.
double embed_composite(const CompositeKey& ck, int t);

/// Assigns composite keys to a locally key-sorted record buffer:
/// (key, origin_machine, position-among-equal-keys). Sorting the result by
/// composite key is a stable sort by primary key. Throws ConfigError when
/// the input is not sorted or a duplicate run reaches kEmbedMaxRun.
std::vector<TaggedRecord> tag_duplicates(std::vector<Record> sorted_records,
                                         int origin_machine);

}  // namespace akmin
