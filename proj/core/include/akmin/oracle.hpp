#pragma once

#include <cstdint>
#include <vector>

#include "akmin/record.hpp"

namespace akmin {

/// Per-key join result size: `in_s` x `in_t` tuples.
struct KeySize {
  std::int64_t key = 0;
  std::uint64_t in_s = 0;
  std::uint64_t in_t = 0;

  std::uint64_t result_size() const { return in_s * in_t; }
  bool operator==(const KeySize&) const = default;
};

/// Ground-truth summary of an equi-join: total output size W, the per-key
/// sizes, and the skew factor sigma = W / (|S| + |T|).
struct JoinSummary {
  std::uint64_t size_s = 0;
  std::uint64_t size_t_ = 0;
  std::uint64_t total = 0;  // W
  std::vector<KeySize> per_key;
  double sigma = 0.0;
};

/// Stable sequential sort by primary key; the ordering reference for every
/// parallel sort in the library.
std::vector<Record> seq_sort(std::vector<Record> records);

struct OracleJoin {
  JoinSummary summary;
  std::vector<JoinedTuple> tuples;  // filled only when materialized
};

/// Exact nested-loop equi-join grouped per key. Materialized tuples are
/// ordered by (key, S position, T position); counting mode computes the
/// same summary without producing tuples.
OracleJoin oracle_join(const std::vector<Record>& s,
                       const std::vector<Record>& t, bool materialize = true);

/// sigma from Definition of the join skew factor; throws DataSpecError on
/// empty inputs where the ratio is undefined.
double skew_factor(const JoinSummary& summary);

}  // namespace akmin
