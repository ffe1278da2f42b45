#include "akmin/oracle.hpp"

#include <algorithm>

#include "akmin/errors.hpp"

namespace akmin {

namespace {

/// (key, original position) pairs sorted by key; positions keep the
/// nested-loop enumeration stable without copying payloads.
std::vector<std::pair<std::int64_t, std::uint32_t>> key_index(
    const std::vector<Record>& table) {
  std::vector<std::pair<std::int64_t, std::uint32_t>> idx;
  idx.reserve(table.size());
  for (std::uint32_t i = 0; i < table.size(); ++i) {
    idx.emplace_back(table[i].key, i);
  }
  std::stable_sort(idx.begin(), idx.end(),
                   [](const auto& a, const auto& b) { return a.first < b.first; });
  return idx;
}

}  // namespace

std::vector<Record> seq_sort(std::vector<Record> records) {
  std::stable_sort(records.begin(), records.end(),
                   [](const Record& a, const Record& b) { return a.key < b.key; });
  return records;
}

OracleJoin oracle_join(const std::vector<Record>& s,
                       const std::vector<Record>& t, bool materialize) {
  OracleJoin out;
  out.summary.size_s = s.size();
  out.summary.size_t_ = t.size();

  const auto s_idx = key_index(s);
  const auto t_idx = key_index(t);

  std::size_t i = 0, j = 0;
  while (i < s_idx.size() && j < t_idx.size()) {
    const std::int64_t ks = s_idx[i].first;
    const std::int64_t kt = t_idx[j].first;
    if (ks < kt) {
      ++i;
      continue;
    }
    if (kt < ks) {
      ++j;
      continue;
    }
    std::size_t i_end = i;
    while (i_end < s_idx.size() && s_idx[i_end].first == ks) ++i_end;
    std::size_t j_end = j;
    while (j_end < t_idx.size() && t_idx[j_end].first == ks) ++j_end;

    const std::uint64_t ms = i_end - i;
    const std::uint64_t nt = j_end - j;
    out.summary.per_key.push_back(KeySize{ks, ms, nt});
    out.summary.total += ms * nt;
    if (materialize) {
      for (std::size_t a = i; a < i_end; ++a) {
        for (std::size_t b = j; b < j_end; ++b) {
          out.tuples.push_back(JoinedTuple{ks, s[s_idx[a].second].payload,
                                           t[t_idx[b].second].payload});
        }
      }
    }
    i = i_end;
    j = j_end;
  }

  if (out.summary.size_s + out.summary.size_t_ > 0) {
    out.summary.sigma = skew_factor(out.summary);
  }
  return out;
}

double skew_factor(const JoinSummary& summary) {
  const std::uint64_t denom = summary.size_s + summary.size_t_;
  if (denom == 0) {
    throw DataSpecError("skew factor undefined for empty inputs");
  }
  return static_cast<double>(summary.total) / static_cast<double>(denom);
}

}  // namespace akmin
