#pragma once

#include <cstdint>
#include <vector>

#include "akmin/record.hpp"

namespace akmin {

enum class DatasetKind { uniform, zipf, scalar_skew };

/// Everything a generator needs; all randomness derives from seed.
struct DatasetSpec {
  DatasetKind kind = DatasetKind::uniform;
  std::uint64_t n = 0;
  std::int64_t key_lo = 0;        // uniform / zipf inclusive domain
  std::int64_t key_hi = 0;
  double theta = 1.0;             // zipf skew in [0,1]; 1 = uniform
  std::uint64_t skew_count = 0;   // scalar_skew occurrences of key n
  std::uint64_t seed = 0;
  std::size_t payload_len = 87;   // key + tag + 87 bytes ~ 95-byte tuples
  TableTag table = TableTag::none;
};

/// Zipf pmf over frequency ranks 1..domain_size with weight 1/r^(1-theta);
/// rank 1 is the most frequent. Exposed so tests can pin exact values.
std::vector<double> zipf_pmf(std::uint64_t domain_size, double theta);

/// n records with keys i.i.d. uniform over [key_lo, key_hi].
std::vector<Record> gen_uniform(const DatasetSpec& spec);

/// n records drawn from the Zipf pmf; rank r maps to the r-th smallest
/// domain key. Sampling inverts a precomputed cumulative table.
std::vector<Record> gen_zipf(const DatasetSpec& spec);

/// Scalar skew: exactly skew_count records with key = n, the rest i.i.d.
/// uniform over the remainder of [n, 2n).
std::vector<Record> gen_scalar_skew(const DatasetSpec& spec);

std::vector<Record> generate(const DatasetSpec& spec);

}  // namespace akmin
