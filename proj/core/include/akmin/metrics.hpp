#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "akmin/runtime.hpp"

namespace akmin {

enum class Algorithm { smms, terasort, randjoin, statjoin };

const char* algorithm_name(Algorithm a);

/// One named bound verdict, e.g. theorem1: max workload vs its limit.
struct BoundCheck {
  std::string name;
  bool pass = false;
  double value = 0.0;
  double limit = 0.0;
};

/// W_i / N_i / C_i per machine for one algorithm round, aggregated over
/// the simulated barriers the round spans.
struct RoundMetrics {
  int round = 0;
  std::vector<std::uint64_t> w;
  std::vector<std::uint64_t> n;
  std::vector<std::uint64_t> c;
  std::vector<std::uint64_t> self;
  double k_workload = 0.0;
  double k_network = 0.0;
};

struct MinimalityReport {
  Algorithm algorithm = Algorithm::smms;
  int t = 0;
  int alpha = 0;          // algorithm rounds, the paper-facing count
  int raw_barriers = 0;   // simulated barriers actually executed
  std::uint64_t n_in = 0;
  std::uint64_t n_out = 0;
  std::uint64_t w_seq = 0;       // max(N_in, N_out); N_out for joins
  std::uint64_t n_total = 0;     // N_in + N_out
  std::vector<RoundMetrics> rounds;
  double k_workload = 0.0;       // max over rounds
  double k_network = 0.0;
  double imbalance = 1.0;        // max/mean W_i in the heaviest round
  double c_ratio_max = 0.0;      // max C_i / (W_seq / t), no threshold
  double sigma = -1.0;           // join skew factor, < 0 for sorts
  double theoretical_k = 0.0;
  std::string theoretical_pair;  // e.g. "(3,1.35)"
  std::vector<BoundCheck> bound_checks;
  std::vector<std::pair<std::string, std::string>> notes;
};

/// Algorithm-specific inputs to report building beyond the raw round log.
struct AlgorithmTag {
  Algorithm algorithm = Algorithm::smms;
  int r = 0;                           // SMMS sampling multiplier
  std::uint64_t m = 0;                 // records per machine (sorts)
  std::uint64_t join_output = 0;       // W (joins)
  double sigma = -1.0;                 // joins
  bool lemma3_met = true;              // StatJoin rectangle hypothesis
  std::uint64_t expected_map_sent = 0; // RandJoin b|S| + a|T| replication total
  std::vector<std::pair<std::string, std::string>> notes;
};

/// Folds a complete round log (paper_round labels and workloads assigned)
/// into the minimality report: per-round W/N/C, the k factors against
/// W_seq/t and N/t, imbalance, and the algorithm's theorem checks.
MinimalityReport build_report(const std::vector<RoundStats>& round_log,
                              std::uint64_t n_in, std::uint64_t n_out, int t,
                              const AlgorithmTag& tag);

/// Deterministic CSV: one row per (round, machine), then a summary row.
/// Doubles use shortest round-trip formatting, so re-emission is
/// byte-identical.
std::string report_to_csv(const MinimalityReport& report);
void emit_csv(const MinimalityReport& report, const std::filesystem::path& path);

/// Inverse of report_to_csv for the fields the CSV carries.
MinimalityReport parse_csv_report(const std::filesystem::path& path);
MinimalityReport parse_csv_report_text(const std::string& text);

/// Aligned human-readable rendering used by the CLI report command.
std::string render_report(const MinimalityReport& report);

}  // namespace akmin
