#include "akmin/metrics.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>

#include "akmin/errors.hpp"

namespace akmin {

namespace {

std::string fmt_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

double parse_double(std::string_view text, const char* what) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw ParseError(std::string("bad numeric field for ") + what, 0);
  }
  return v;
}

std::uint64_t parse_u64(std::string_view text, const char* what) {
  std::uint64_t v = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw ParseError(std::string("bad integer field for ") + what, 0);
  }
  return v;
}

/// (alpha, k) with k rounded up at two decimals, the convention the
/// minimality pairs are quoted in.
std::string minimal_pair(int alpha, double k) {
  char buf[64];
  if (std::isfinite(k)) {
    const double k2 = std::ceil(k * 100.0 - 1e-9) / 100.0;
    std::snprintf(buf, sizeof(buf), "(%d,%.2f)", alpha, k2);
  } else {
    std::snprintf(buf, sizeof(buf), "(%d,inf)", alpha);
  }
  return buf;
}

std::uint64_t max_of(const std::vector<std::uint64_t>& v) {
  return v.empty() ? 0 : *std::max_element(v.begin(), v.end());
}

std::uint64_t sum_of(const std::vector<std::uint64_t>& v) {
  std::uint64_t s = 0;
  for (auto x : v) s += x;
  return s;
}

}  // namespace

const char* algorithm_name(Algorithm a) {
  switch (a) {
    case Algorithm::smms: return "smms";
    case Algorithm::terasort: return "terasort";
    case Algorithm::randjoin: return "randjoin";
    case Algorithm::statjoin: return "statjoin";
  }
  return "unknown";
}

MinimalityReport build_report(const std::vector<RoundStats>& round_log,
                              std::uint64_t n_in, std::uint64_t n_out, int t,
                              const AlgorithmTag& tag) {
  if (round_log.empty()) throw ConfigError("cannot build a report from an empty round log");
  const auto machines = static_cast<std::size_t>(t);

  MinimalityReport rep;
  rep.algorithm = tag.algorithm;
  rep.t = t;
  rep.raw_barriers = static_cast<int>(round_log.size());
  rep.n_in = n_in;
  rep.n_out = n_out;
  rep.n_total = n_in + n_out;
  const bool is_join =
      tag.algorithm == Algorithm::randjoin || tag.algorithm == Algorithm::statjoin;
  // Sorting workloads are input-driven; join workloads are dominated by the
  // output size.
  rep.w_seq = is_join ? n_out : std::max(n_in, n_out);
  rep.sigma = tag.sigma;

  int alpha = 0;
  for (const auto& rs : round_log) {
    if (rs.paper_round < 1) {
      throw ConfigError("round log entry missing its algorithm round label");
    }
    alpha = std::max(alpha, rs.paper_round);
  }
  rep.alpha = alpha;
  rep.rounds.assign(static_cast<std::size_t>(alpha), RoundMetrics{});
  for (int r = 0; r < alpha; ++r) {
    auto& rm = rep.rounds[static_cast<std::size_t>(r)];
    rm.round = r + 1;
    rm.w.assign(machines, 0);
    rm.n.assign(machines, 0);
    rm.c.assign(machines, 0);
    rm.self.assign(machines, 0);
  }
  for (const auto& rs : round_log) {
    auto& rm = rep.rounds[static_cast<std::size_t>(rs.paper_round - 1)];
    for (std::size_t i = 0; i < machines; ++i) {
      rm.w[i] += rs.workload[i];
      rm.n[i] += rs.sent[i] + rs.received[i];
      rm.c[i] += rs.processed[i];
      rm.self[i] += rs.self_delivered[i];
    }
  }

  const double even_w = static_cast<double>(rep.w_seq) / t;
  const double even_n = static_cast<double>(rep.n_total) / t;
  double max_round_w = -1.0;
  for (auto& rm : rep.rounds) {
    const std::uint64_t wmax = max_of(rm.w);
    const std::uint64_t nmax = max_of(rm.n);
    rm.k_workload = even_w > 0 ? static_cast<double>(wmax) / even_w : 0.0;
    rm.k_network = even_n > 0 ? static_cast<double>(nmax) / even_n : 0.0;
    rep.k_workload = std::max(rep.k_workload, rm.k_workload);
    rep.k_network = std::max(rep.k_network, rm.k_network);
    rep.c_ratio_max = std::max(
        rep.c_ratio_max,
        even_w > 0 ? static_cast<double>(max_of(rm.c)) / even_w : 0.0);
    if (static_cast<double>(wmax) > max_round_w) {
      max_round_w = static_cast<double>(wmax);
      const std::uint64_t wsum = sum_of(rm.w);
      rep.imbalance = wsum > 0 ? static_cast<double>(wmax) * t /
                                     static_cast<double>(wsum)
                               : 1.0;
    }
  }

  // Theorem bounds. Checks use the final algorithm round, which carries the
  // data-bearing workload for every algorithm here.
  const RoundMetrics& last = rep.rounds.back();
  const double n_padded = static_cast<double>(tag.m) * t;
  switch (tag.algorithm) {
    case Algorithm::smms: {
      rep.theoretical_k =
          1.0 + 2.0 / tag.r +
          static_cast<double>(tag.r) * std::pow(t, 3) / static_cast<double>(n_in);
      const double limit =
          (1.0 + 2.0 / tag.r + static_cast<double>(t) * t / n_padded) *
          static_cast<double>(tag.m);
      const auto value = static_cast<double>(max_of(last.w));
      rep.bound_checks.push_back(BoundCheck{"theorem1", value <= limit, value, limit});
      break;
    }
    case Algorithm::terasort: {
      rep.theoretical_k = 5.0 + std::pow(t, 3) / static_cast<double>(n_in);
      const double limit = 5.0 * (static_cast<double>(n_in) / t) + 1.0;
      const auto value = static_cast<double>(max_of(last.w));
      rep.bound_checks.push_back(BoundCheck{"theorem3", value <= limit, value, limit});
      break;
    }
    case Algorithm::randjoin: {
      rep.theoretical_k = tag.sigma > 0 ? 2.0 + t / tag.sigma
                                        : std::numeric_limits<double>::infinity();
      const std::uint64_t wmax = max_of(last.w);
      // Probabilistic per-run observation of the twice-even-share bound.
      rep.bound_checks.push_back(
          BoundCheck{"output_lt_2wt",
                     wmax * static_cast<std::uint64_t>(t) < 2 * tag.join_output ||
                         tag.join_output == 0,
                     static_cast<double>(wmax),
                     2.0 * static_cast<double>(tag.join_output) / t});
      std::uint64_t map_sent = 0;
      for (const auto& rs : round_log) map_sent += rs.total_sent();
      rep.bound_checks.push_back(BoundCheck{"replication",
                                            map_sent == tag.expected_map_sent,
                                            static_cast<double>(map_sent),
                                            static_cast<double>(tag.expected_map_sent)});
      break;
    }
    case Algorithm::statjoin: {
      rep.theoretical_k = tag.sigma > 0 ? 2.0 + t / tag.sigma
                                        : std::numeric_limits<double>::infinity();
      const std::uint64_t wmax = max_of(last.w);
      const bool pass = wmax * static_cast<std::uint64_t>(t) <= 2 * tag.join_output;
      rep.bound_checks.push_back(
          BoundCheck{"theorem6", pass, static_cast<double>(wmax),
                     2.0 * static_cast<double>(tag.join_output) / t});
      rep.notes.emplace_back("lemma3_hypothesis", tag.lemma3_met ? "met" : "unmet");
      break;
    }
  }
  rep.theoretical_pair = minimal_pair(rep.alpha, rep.theoretical_k);
  rep.notes.emplace_back("self_sends_counted", "true");
  for (const auto& note : tag.notes) rep.notes.push_back(note);
  return rep;
}

std::string report_to_csv(const MinimalityReport& rep) {
  std::string out = "algorithm,round,machine,W_i,N_i,C_i,self_i\n";
  const char* name = algorithm_name(rep.algorithm);
  for (const auto& rm : rep.rounds) {
    for (std::size_t i = 0; i < rm.w.size(); ++i) {
      out += name;
      out += ',';
      out += std::to_string(rm.round);
      out += ',';
      out += std::to_string(i + 1);
      out += ',';
      out += std::to_string(rm.w[i]);
      out += ',';
      out += std::to_string(rm.n[i]);
      out += ',';
      out += std::to_string(rm.c[i]);
      out += ',';
      out += std::to_string(rm.self[i]);
      out += '\n';
    }
  }
  out += "summary";
  out += ",algorithm=";
  out += name;
  out += ",t=" + std::to_string(rep.t);
  out += ",alpha=" + std::to_string(rep.alpha);
  out += ",raw_barriers=" + std::to_string(rep.raw_barriers);
  out += ",n_in=" + std::to_string(rep.n_in);
  out += ",n_out=" + std::to_string(rep.n_out);
  out += ",w_seq=" + std::to_string(rep.w_seq);
  out += ",n_total=" + std::to_string(rep.n_total);
  out += ",k_workload=" + fmt_double(rep.k_workload);
  out += ",k_network=" + fmt_double(rep.k_network);
  out += ",imbalance=" + fmt_double(rep.imbalance);
  out += ",c_ratio_max=" + fmt_double(rep.c_ratio_max);
  out += ",sigma=" + fmt_double(rep.sigma);
  out += ",theoretical_k=" + fmt_double(rep.theoretical_k);
  out += ",theoretical=" + rep.theoretical_pair;
  for (const auto& check : rep.bound_checks) {
    out += "," + check.name + "=" + (check.pass ? "pass" : "fail");
    out += "," + check.name + "_value=" + fmt_double(check.value);
    out += "," + check.name + "_limit=" + fmt_double(check.limit);
  }
  for (const auto& [key, value] : rep.notes) {
    out += "," + key + "=" + value;
  }
  out += '\n';
  return out;
}

void emit_csv(const MinimalityReport& report, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  const std::string text = report_to_csv(report);
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw IoError("short write to " + path.string());
}

namespace {

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> parts;
  std::size_t pos = 0;
  while (true) {
    const std::size_t next = line.find(sep, pos);
    if (next == std::string::npos) {
      parts.push_back(line.substr(pos));
      break;
    }
    parts.push_back(line.substr(pos, next - pos));
    pos = next + 1;
  }
  return parts;
}

Algorithm algorithm_from(const std::string& name) {
  if (name == "smms") return Algorithm::smms;
  if (name == "terasort") return Algorithm::terasort;
  if (name == "randjoin") return Algorithm::randjoin;
  if (name == "statjoin") return Algorithm::statjoin;
  throw ParseError("unknown algorithm '" + name + "'", 0);
}

}  // namespace

MinimalityReport parse_csv_report_text(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw ParseError("empty report", 0);

  MinimalityReport rep;
  bool saw_summary = false;
  std::map<std::pair<int, int>, std::array<std::uint64_t, 4>> cells;
  int max_round = 0, max_machine = 0;

  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto parts = split(line, ',');
    if (parts[0] == "summary") {
      saw_summary = true;
      // Values like the (alpha,k) pair contain commas; glue fragments
      // without '=' back onto the preceding item.
      std::vector<std::string> items;
      for (std::size_t i = 1; i < parts.size(); ++i) {
        if (parts[i].find('=') == std::string::npos && !items.empty()) {
          items.back() += "," + parts[i];
        } else {
          items.push_back(parts[i]);
        }
      }
      for (const auto& item : items) {
        const std::size_t eq = item.find('=');
        if (eq == std::string::npos) {
          throw ParseError("summary item without '=': " + item, 0);
        }
        const std::string key = item.substr(0, eq);
        const std::string value = item.substr(eq + 1);
        if (key == "algorithm") rep.algorithm = algorithm_from(value);
        else if (key == "t") rep.t = static_cast<int>(parse_u64(value, "t"));
        else if (key == "alpha") rep.alpha = static_cast<int>(parse_u64(value, "alpha"));
        else if (key == "raw_barriers") rep.raw_barriers = static_cast<int>(parse_u64(value, "raw_barriers"));
        else if (key == "n_in") rep.n_in = parse_u64(value, "n_in");
        else if (key == "n_out") rep.n_out = parse_u64(value, "n_out");
        else if (key == "w_seq") rep.w_seq = parse_u64(value, "w_seq");
        else if (key == "n_total") rep.n_total = parse_u64(value, "n_total");
        else if (key == "k_workload") rep.k_workload = parse_double(value, "k_workload");
        else if (key == "k_network") rep.k_network = parse_double(value, "k_network");
        else if (key == "imbalance") rep.imbalance = parse_double(value, "imbalance");
        else if (key == "c_ratio_max") rep.c_ratio_max = parse_double(value, "c_ratio_max");
        else if (key == "sigma") rep.sigma = value == "inf" ? std::numeric_limits<double>::infinity() : parse_double(value, "sigma");
        else if (key == "theoretical_k") rep.theoretical_k = value == "inf" ? std::numeric_limits<double>::infinity() : parse_double(value, "theoretical_k");
        else if (key == "theoretical") rep.theoretical_pair = value;
        else if (key.ends_with("_value") || key.ends_with("_limit")) {
          const bool is_value = key.ends_with("_value");
          const std::string base = key.substr(0, key.size() - 6);
          for (auto& check : rep.bound_checks) {
            if (check.name == base) {
              (is_value ? check.value : check.limit) = parse_double(value, key.c_str());
            }
          }
        } else if (value == "pass" || value == "fail") {
          rep.bound_checks.push_back(BoundCheck{key, value == "pass", 0.0, 0.0});
        } else {
          rep.notes.emplace_back(key, value);
        }
      }
      break;
    }
    if (parts.size() != 7) throw ParseError("expected 7 columns, got row '" + line + "'", 0);
    rep.algorithm = algorithm_from(parts[0]);
    const int round = static_cast<int>(parse_u64(parts[1], "round"));
    const int machine = static_cast<int>(parse_u64(parts[2], "machine"));
    cells[{round, machine}] = {parse_u64(parts[3], "W_i"), parse_u64(parts[4], "N_i"),
                               parse_u64(parts[5], "C_i"), parse_u64(parts[6], "self_i")};
    max_round = std::max(max_round, round);
    max_machine = std::max(max_machine, machine);
  }
  if (!saw_summary) throw ParseError("report has no summary row", 0);

  rep.rounds.assign(static_cast<std::size_t>(max_round), RoundMetrics{});
  for (int r = 1; r <= max_round; ++r) {
    auto& rm = rep.rounds[static_cast<std::size_t>(r - 1)];
    rm.round = r;
    rm.w.assign(static_cast<std::size_t>(max_machine), 0);
    rm.n.assign(static_cast<std::size_t>(max_machine), 0);
    rm.c.assign(static_cast<std::size_t>(max_machine), 0);
    rm.self.assign(static_cast<std::size_t>(max_machine), 0);
  }
  for (const auto& [key, vals] : cells) {
    auto& rm = rep.rounds[static_cast<std::size_t>(key.first - 1)];
    const auto i = static_cast<std::size_t>(key.second - 1);
    rm.w[i] = vals[0];
    rm.n[i] = vals[1];
    rm.c[i] = vals[2];
    rm.self[i] = vals[3];
  }
  return rep;
}

MinimalityReport parse_csv_report(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::string text((std::istreambuf_iterator<char>(in)),
                   std::istreambuf_iterator<char>());
  return parse_csv_report_text(text);
}

std::string render_report(const MinimalityReport& rep) {
  std::ostringstream out;
  out << "algorithm " << algorithm_name(rep.algorithm) << ", t=" << rep.t
      << ", alpha=" << rep.alpha << " (raw barriers " << rep.raw_barriers << ")\n";
  out << "N_in=" << rep.n_in << " N_out=" << rep.n_out << " W_seq=" << rep.w_seq
      << " N=" << rep.n_total;
  if (rep.sigma >= 0) out << " sigma=" << rep.sigma;
  out << "\n\n";
  out << "round machine          W_i          N_i          C_i       self_i\n";
  for (const auto& rm : rep.rounds) {
    for (std::size_t i = 0; i < rm.w.size(); ++i) {
      char buf[128];
      std::snprintf(buf, sizeof(buf), "%5d %7zu %12llu %12llu %12llu %12llu\n",
                    rm.round, i + 1,
                    static_cast<unsigned long long>(rm.w[i]),
                    static_cast<unsigned long long>(rm.n[i]),
                    static_cast<unsigned long long>(rm.c[i]),
                    static_cast<unsigned long long>(rm.self[i]));
      out << buf;
    }
  }
  out << "\nk_workload=" << rep.k_workload << " k_network=" << rep.k_network
      << " imbalance=" << rep.imbalance << " c_ratio_max=" << rep.c_ratio_max
      << "\ntheoretical " << rep.theoretical_pair << "\n";
  for (const auto& check : rep.bound_checks) {
    out << check.name << ": " << (check.pass ? "pass" : "fail")
        << " (value=" << check.value << ", limit=" << check.limit << ")\n";
  }
  for (const auto& [key, value] : rep.notes) {
    out << key << "=" << value << "\n";
  }
  return out.str();
}

}  // namespace akmin
