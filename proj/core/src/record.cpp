#include "akmin/record.hpp"

#include <cmath>
#include <cstdlib>
#include <utility>

#include "akmin/errors.hpp"

namespace akmin {

double embed_composite(const CompositeKey& ck, int t) {
  if (t < 1 || t > kEmbedMaxMachines) {
    throw ConfigError("composite embedding supports 1..255 machines, got t=" +
                      std::to_string(t));
  }
  if (ck.origin < 1 || ck.origin > t) {
    throw ConfigError("composite origin " + std::to_string(ck.origin) +
                      " outside 1.." + std::to_string(t));
  }
  if (ck.index >= kEmbedMaxRun) {
    throw ConfigError("duplicate run of length >= 2^20 for key " +
                      std::to_string(ck.key) + " on machine " +
                      std::to_string(ck.origin));
  }
  if (ck.key > kEmbedKeyLimit || ck.key < -kEmbedKeyLimit) {
    throw ConfigError("key " + std::to_string(ck.key) +
                      " outside the embeddable range [-2^24, 2^24]");
  }
  const double denom =
      static_cast<double>((static_cast<std::uint64_t>(t) + 1) * kEmbedMaxRun);
  const double frac =
      (static_cast<double>(ck.origin) * static_cast<double>(kEmbedMaxRun) +
       static_cast<double>(ck.index)) /
      denom;
  return static_cast<double>(ck.key) + frac;
}

std::vector<TaggedRecord> tag_duplicates(std::vector<Record> sorted_records,
                                         int origin_machine) {
  std::vector<TaggedRecord> out;
  out.reserve(sorted_records.size());
  std::int64_t prev_key = 0;
  std::uint64_t run = 0;
  bool first = true;
  for (auto& rec : sorted_records) {
    if (!first && rec.key < prev_key) {
      throw ConfigError("tag_duplicates requires locally key-sorted input");
    }
    if (!first && rec.key == prev_key) {
      ++run;
      if (run >= kEmbedMaxRun) {
        throw ConfigError("duplicate run of length >= 2^20 for key " +
                          std::to_string(rec.key));
      }
    } else {
      run = 0;
    }
    prev_key = rec.key;
    first = false;
    out.push_back(TaggedRecord{
        CompositeKey{rec.key, origin_machine, run}, std::move(rec)});
  }
  return out;
}

}  // namespace akmin
