#include "akmin/datagen.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "akmin/errors.hpp"
#include "akmin/rng.hpp"

namespace akmin {

namespace {

constexpr std::uint64_t kMaxZipfDomain = 10'000'000;

void fill_payload(Record& rec, std::size_t len, Rng& rng) {
  rec.payload.resize(len);
  std::size_t i = 0;
  while (i < len) {
    std::uint64_t word = rng.next_u64();
    for (int b = 0; b < 8 && i < len; ++b, ++i) {
      rec.payload[i] = static_cast<char>(word & 0xff);
      word >>= 8;
    }
  }
}

Rng rng_for(const DatasetSpec& spec) {
  // Separate stream per table tag so S and T generated from one seed differ.
  return Rng(spec.seed, static_cast<std::uint64_t>(spec.table));
}

}  // namespace

std::vector<double> zipf_pmf(std::uint64_t domain_size, double theta) {
  if (domain_size == 0) throw DataSpecError("zipf domain must be nonempty");
  if (!(theta >= 0.0 && theta <= 1.0)) {
    throw DataSpecError("zipf theta must lie in [0,1], got " + std::to_string(theta));
  }
  const double exponent = 1.0 - theta;
  std::vector<double> pmf(domain_size);
  double total = 0.0;
  for (std::uint64_t r = 1; r <= domain_size; ++r) {
    pmf[r - 1] = 1.0 / std::pow(static_cast<double>(r), exponent);
    total += pmf[r - 1];
  }
  for (auto& p : pmf) p /= total;
  return pmf;
}

std::vector<Record> gen_uniform(const DatasetSpec& spec) {
  if (spec.n == 0) throw DataSpecError("record count must be >= 1");
  if (spec.key_lo > spec.key_hi) throw DataSpecError("empty key domain");
  Rng rng = rng_for(spec);
  std::vector<Record> out(spec.n);
  for (auto& rec : out) {
    rec.key = rng.uniform_int(spec.key_lo, spec.key_hi);
    rec.table = spec.table;
    fill_payload(rec, spec.payload_len, rng);
  }
  return out;
}

std::vector<Record> gen_zipf(const DatasetSpec& spec) {
  if (spec.n == 0) throw DataSpecError("record count must be >= 1");
  if (spec.key_lo > spec.key_hi) throw DataSpecError("empty key domain");
  const std::uint64_t domain =
      static_cast<std::uint64_t>(spec.key_hi - spec.key_lo) + 1;
  if (domain > kMaxZipfDomain) {
    throw DataSpecError("zipf domain too large for the cumulative table");
  }
  const std::vector<double> pmf = zipf_pmf(domain, spec.theta);
  std::vector<double> cdf(pmf.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < pmf.size(); ++i) {
    acc += pmf[i];
    cdf[i] = acc;
  }
  cdf.back() = 1.0;

  Rng rng = rng_for(spec);
  std::vector<Record> out(spec.n);
  for (auto& rec : out) {
    const double u = rng.uniform01();
    const auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
    const std::uint64_t rank =
        static_cast<std::uint64_t>(it - cdf.begin());  // 0-based rank
    rec.key = spec.key_lo + static_cast<std::int64_t>(rank);
    rec.table = spec.table;
    fill_payload(rec, spec.payload_len, rng);
  }
  return out;
}

std::vector<Record> gen_scalar_skew(const DatasetSpec& spec) {
  if (spec.n == 0) throw DataSpecError("record count must be >= 1");
  if (spec.skew_count > spec.n) {
    throw DataSpecError("skew_count " + std::to_string(spec.skew_count) +
                        " exceeds record count " + std::to_string(spec.n));
  }
  const std::int64_t special = static_cast<std::int64_t>(spec.n);
  // The non-special keys are uniform over [n, 2n) minus the special key
  // itself, which keeps the special-key frequency exactly skew_count.
  if (spec.skew_count < spec.n && spec.n < 2) {
    throw DataSpecError("scalar skew needs n >= 2 to host non-special keys");
  }
  Rng rng = rng_for(spec);
  std::vector<Record> out(spec.n);
  for (std::uint64_t i = 0; i < spec.n; ++i) {
    Record& rec = out[i];
    rec.key = i < spec.skew_count ? special
                                  : rng.uniform_int(special + 1, 2 * special - 1);
    rec.table = spec.table;
    fill_payload(rec, spec.payload_len, rng);
  }
  return out;
}

std::vector<Record> generate(const DatasetSpec& spec) {
  switch (spec.kind) {
    case DatasetKind::uniform: return gen_uniform(spec);
    case DatasetKind::zipf: return gen_zipf(spec);
    case DatasetKind::scalar_skew: return gen_scalar_skew(spec);
  }
  throw DataSpecError("unknown dataset kind");
}

}  // namespace akmin
