// Command line driver: dataset generation, sort/join execution with
// minimality reports, oracle verification, and report pretty-printing.

#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "akmin/datagen.hpp"
#include "akmin/dataset_io.hpp"
#include "akmin/errors.hpp"
#include "akmin/join_rand.hpp"
#include "akmin/join_stat.hpp"
#include "akmin/metrics.hpp"
#include "akmin/oracle.hpp"
#include "akmin/sort_smms.hpp"
#include "akmin/sort_terasort.hpp"

namespace fs = std::filesystem;
using namespace akmin;

namespace {

struct DomainRange {
  std::int64_t lo = 0;
  std::int64_t hi = 0;
};

DomainRange parse_domain(const std::string& text) {
  const auto colon = text.find(':');
  if (colon == std::string::npos) {
    throw CLI::ValidationError("--domain", "expected lo:hi");
  }
  DomainRange out;
  const auto* begin = text.data();
  auto res = std::from_chars(begin, begin + colon, out.lo);
  if (res.ec != std::errc() || res.ptr != begin + colon) {
    throw CLI::ValidationError("--domain", "bad lower bound");
  }
  const auto* hi_begin = begin + colon + 1;
  const auto* end = begin + text.size();
  res = std::from_chars(hi_begin, end, out.hi);
  if (res.ec != std::errc() || res.ptr != end) {
    throw CLI::ValidationError("--domain", "bad upper bound");
  }
  return out;
}

std::vector<Record> retag(std::vector<Record> records, TableTag tag) {
  for (auto& rec : records) rec.table = tag;
  return records;
}

std::string fmt_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

void write_text_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw IoError("short write to " + path.string());
}

std::vector<fs::path> find_parts(const fs::path& dir) {
  std::vector<fs::path> parts;
  for (int k = 1;; ++k) {
    fs::path part = dir / ("part-" + std::to_string(k));
    if (!fs::exists(part)) break;
    parts.push_back(std::move(part));
  }
  if (parts.empty()) throw IoError("no part-<k> files under " + dir.string());
  return parts;
}

int run_gen(const std::string& kind, std::uint64_t n, const std::string& domain,
            double theta, std::uint64_t skew_count, std::uint64_t seed,
            std::size_t payload_len, const std::string& table,
            const std::string& format, const fs::path& output) {
  DatasetSpec spec;
  spec.n = n;
  spec.theta = theta;
  spec.skew_count = skew_count;
  spec.seed = seed;
  spec.payload_len = payload_len;
  spec.table = table == "s" ? TableTag::s : table == "t" ? TableTag::t : TableTag::none;
  if (kind == "uniform") spec.kind = DatasetKind::uniform;
  else if (kind == "zipf") spec.kind = DatasetKind::zipf;
  else spec.kind = DatasetKind::scalar_skew;
  if (spec.kind != DatasetKind::scalar_skew) {
    if (domain.empty()) throw DataSpecError("--domain is required for " + kind);
    const DomainRange range = parse_domain(domain);
    spec.key_lo = range.lo;
    spec.key_hi = range.hi;
  }
  const auto records = generate(spec);
  write_dataset(records, output,
                format == "text" ? FileFormat::text : FileFormat::binary,
                spec.table);
  std::cout << "wrote " << records.size() << " records to " << output.string()
            << "\n";
  return 0;
}

int run_sort(const std::string& algo, int t, int r, std::uint64_t seed,
             const fs::path& input, const fs::path& outdir, bool debug_samples) {
  auto records = read_dataset(input);
  const TableTag tag = records.empty() ? TableTag::none : records.front().table;
  fs::create_directories(outdir);
  Cluster cluster(t, seed);

  std::vector<std::vector<Record>> partitions;
  MinimalityReport report;
  if (algo == "smms") {
    auto run = smms_sort(cluster, std::move(records), SmmsOptions{r});
    std::string csv = "k,b_k\n";
    for (std::size_t k = 0; k < run.boundaries.values.size(); ++k) {
      csv += std::to_string(k) + "," + fmt_double(run.boundaries.values[k]) + "\n";
    }
    write_text_file(outdir / "boundaries.csv", csv);
    partitions = std::move(run.partitions);
    report = std::move(run.report);
  } else {
    TerasortOptions options;
    options.capture_samples = debug_samples;
    auto run = terasort(cluster, std::move(records), options);
    if (debug_samples) {
      std::string csv = "machine,value\n";
      for (std::size_t i = 0; i < run.samples.size(); ++i) {
        for (const auto& ck : run.samples[i]) {
          csv += std::to_string(i + 1) + "," + std::to_string(ck.key) + "\n";
        }
      }
      write_text_file(outdir / "samples.csv", csv);
    }
    partitions = std::move(run.partitions);
    report = std::move(run.report);
  }
  for (std::size_t k = 0; k < partitions.size(); ++k) {
    write_dataset(partitions[k], outdir / ("part-" + std::to_string(k + 1)),
                  FileFormat::binary, tag);
  }
  emit_csv(report, outdir / "report.csv");
  std::cout << algorithm_name(report.algorithm) << ": sorted " << report.n_in
            << " records on " << t << " machines, imbalance "
            << fmt_double(report.imbalance) << "\n";
  return 0;
}

int run_join(const std::string& algo, int t, int r, std::uint64_t seed,
             const fs::path& s_path, const fs::path& t_path, bool count_only,
             const fs::path& outdir) {
  auto s = retag(read_dataset(s_path), TableTag::s);
  auto t_table = retag(read_dataset(t_path), TableTag::t);
  fs::create_directories(outdir);
  Cluster cluster(t, seed);
  JoinOptions options;
  options.count_only = count_only;
  options.r = r;

  JoinRun run;
  if (algo == "randjoin") {
    run = randjoin(cluster, std::move(s), std::move(t_table), options);
  } else {
    auto stat_run = statjoin(cluster, std::move(s), std::move(t_table), options);
    auto rects = stat_run.plan.rects;
    std::sort(rects.begin(), rects.end(), [](const PlanRect& a, const PlanRect& b) {
      if (a.key != b.key) return a.key < b.key;
      if (a.lo_s != b.lo_s) return a.lo_s < b.lo_s;
      return a.lo_t < b.lo_t;
    });
    std::string csv = "key,l_s,h_s,l_t,h_t,machine,planned_size\n";
    for (const auto& rect : rects) {
      csv += std::to_string(rect.key) + "," + std::to_string(rect.lo_s) + "," +
             std::to_string(rect.hi_s) + "," + std::to_string(rect.lo_t) + "," +
             std::to_string(rect.hi_t) + "," + std::to_string(rect.machine) +
             "," + std::to_string(rect.size()) + "\n";
    }
    write_text_file(outdir / "plan.csv", csv);
    run = std::move(static_cast<JoinRun&>(stat_run));
  }

  if (!count_only) {
    for (std::size_t k = 0; k < run.parts.size(); ++k) {
      write_join_output(run.parts[k], outdir / ("part-" + std::to_string(k + 1)));
    }
  }
  std::string stats_csv = "machine,input_records,output_records\n";
  for (std::size_t i = 0; i < run.output_counts.size(); ++i) {
    stats_csv += std::to_string(i + 1) + "," + std::to_string(run.input_records[i]) +
                 "," + std::to_string(run.output_counts[i]) + "\n";
  }
  write_text_file(outdir / "join-stats.csv", stats_csv);
  emit_csv(run.report, outdir / "report.csv");
  std::cout << algorithm_name(run.report.algorithm) << ": " << run.total_output
            << " output tuples, sigma " << fmt_double(run.report.sigma)
            << ", imbalance " << fmt_double(run.report.imbalance) << "\n";
  return 0;
}

int verify_sort(const fs::path& input, const fs::path& parts_dir) {
  const auto oracle = seq_sort(read_dataset(input));
  std::vector<Record> got;
  for (const auto& part : find_parts(parts_dir)) {
    auto records = read_dataset(part);
    got.insert(got.end(), std::move_iterator(records.begin()),
               std::move_iterator(records.end()));
  }
  if (got.size() != oracle.size()) {
    std::cerr << "record count mismatch: parts " << got.size() << ", oracle "
              << oracle.size() << "\n";
    return 1;
  }
  for (std::size_t i = 0; i < got.size(); ++i) {
    if (!(got[i] == oracle[i])) {
      std::cerr << "mismatch at position " << i << ": key " << got[i].key
                << " vs oracle " << oracle[i].key << "\n";
      return 1;
    }
  }
  std::cout << "sort output matches the sequential oracle (" << got.size()
            << " records)\n";
  return 0;
}

int verify_join(const fs::path& s_path, const fs::path& t_path,
                const fs::path& parts_dir) {
  const auto s = retag(read_dataset(s_path), TableTag::s);
  const auto t_table = retag(read_dataset(t_path), TableTag::t);

  if (!fs::exists(parts_dir / "part-1")) {
    // Counting-mode run: compare the total output size only.
    const auto oracle = oracle_join(s, t_table, /*materialize=*/false);
    std::ifstream in(parts_dir / "join-stats.csv");
    if (!in) throw IoError("no parts and no join-stats.csv under " + parts_dir.string());
    std::string line;
    std::getline(in, line);  // header
    std::uint64_t total = 0;
    while (std::getline(in, line)) {
      const auto last = line.rfind(',');
      if (last == std::string::npos) continue;
      total += std::stoull(line.substr(last + 1));
    }
    if (total != oracle.summary.total) {
      std::cerr << "output size mismatch: run " << total << ", oracle "
                << oracle.summary.total << "\n";
      return 1;
    }
    std::cout << "join output size matches the oracle (" << total << " tuples)\n";
    return 0;
  }

  auto oracle = oracle_join(s, t_table, /*materialize=*/true);
  std::vector<JoinedTuple> got;
  for (const auto& part : find_parts(parts_dir)) {
    auto tuples = read_join_output(part);
    got.insert(got.end(), std::move_iterator(tuples.begin()),
               std::move_iterator(tuples.end()));
  }
  std::sort(got.begin(), got.end());
  std::sort(oracle.tuples.begin(), oracle.tuples.end());
  if (got != oracle.tuples) {
    std::cerr << "join output multiset differs from the oracle (run "
              << got.size() << " tuples, oracle " << oracle.tuples.size()
              << ")\n";
    return 1;
  }
  std::cout << "join output matches the oracle (" << got.size() << " tuples)\n";
  return 0;
}

int run_report(const fs::path& input) {
  const auto report = parse_csv_report(input);
  std::cout << render_report(report);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"shared-nothing cluster simulator: balanced parallel sort and skew join"};
  app.require_subcommand(1);

  // gen
  auto* gen = app.add_subcommand("gen", "generate a synthetic dataset");
  std::string gen_kind = "uniform", gen_domain, gen_table = "none",
              gen_format = "binary";
  std::uint64_t gen_n = 0, gen_skew = 0, gen_seed = 0;
  double gen_theta = 1.0;
  std::size_t gen_payload = 87;
  fs::path gen_out;
  gen->add_option("--kind", gen_kind)->check(CLI::IsMember({"uniform", "zipf", "scalar_skew"}));
  gen->add_option("--n", gen_n, "record count")->required();
  gen->add_option("--domain", gen_domain, "inclusive key range lo:hi");
  gen->add_option("--theta", gen_theta, "zipf skew in [0,1]");
  gen->add_option("--skew-count", gen_skew, "occurrences of the special key");
  gen->add_option("--seed", gen_seed);
  gen->add_option("--payload-len", gen_payload);
  gen->add_option("--table", gen_table)->check(CLI::IsMember({"none", "s", "t"}));
  gen->add_option("--format", gen_format)->check(CLI::IsMember({"binary", "text"}));
  gen->add_option("-o,--output", gen_out)->required();

  // sort
  auto* sort_cmd = app.add_subcommand("sort", "run a parallel sort");
  std::string sort_algo;
  int sort_t = 0, sort_r = 1;
  std::uint64_t sort_seed = 0;
  fs::path sort_in, sort_out;
  bool sort_debug_samples = false;
  sort_cmd->add_option("--algo", sort_algo)->check(CLI::IsMember({"smms", "terasort"}))->required();
  sort_cmd->add_option("--t", sort_t, "machine count")->required();
  sort_cmd->add_option("--r", sort_r, "sampling multiplier (smms)");
  sort_cmd->add_option("--seed", sort_seed);
  sort_cmd->add_option("-i,--input", sort_in)->required();
  sort_cmd->add_option("-o,--outdir", sort_out)->required();
  sort_cmd->add_flag("--debug-samples", sort_debug_samples, "write samples.csv (terasort)");

  // join
  auto* join_cmd = app.add_subcommand("join", "run a skew equi-join");
  std::string join_algo;
  int join_t = 0, join_r = 1;
  std::uint64_t join_seed = 0;
  fs::path join_s, join_tt, join_out;
  bool join_count_only = false;
  join_cmd->add_option("--algo", join_algo)->check(CLI::IsMember({"randjoin", "statjoin"}))->required();
  join_cmd->add_option("--t", join_t, "machine count")->required();
  join_cmd->add_option("--r", join_r, "statistics-sort sampling multiplier (statjoin)");
  join_cmd->add_option("--seed", join_seed);
  join_cmd->add_option("-s,--s-table", join_s, "S table dataset")->required();
  join_cmd->add_option("--t-table", join_tt, "T table dataset")->required();
  join_cmd->add_flag("--count-only", join_count_only, "account output sizes without materializing");
  join_cmd->add_option("-o,--outdir", join_out)->required();

  // verify
  auto* verify_cmd = app.add_subcommand("verify", "compare run artifacts against the sequential oracle");
  std::string verify_mode;
  fs::path verify_in, verify_s, verify_tt, verify_parts;
  verify_cmd->add_option("--mode", verify_mode)->check(CLI::IsMember({"sort", "join"}))->required();
  verify_cmd->add_option("-i,--input", verify_in, "sorted dataset input");
  verify_cmd->add_option("-s,--s-table", verify_s);
  verify_cmd->add_option("--t-table", verify_tt);
  verify_cmd->add_option("--parts", verify_parts, "directory with part-<k> files")->required();

  // report
  auto* report_cmd = app.add_subcommand("report", "pretty-print a report.csv");
  fs::path report_in;
  report_cmd->add_option("-i,--input", report_in)->required();

  // Accept the single-dash spelling of --t-table.
  std::vector<std::string> args;
  args.reserve(static_cast<std::size_t>(argc));
  for (int i = 0; i < argc; ++i) {
    std::string arg = argv[i];
    if (arg == "-t-table") arg = "--t-table";
    args.push_back(std::move(arg));
  }
  std::vector<char*> argv2;
  argv2.reserve(args.size());
  for (auto& arg : args) argv2.push_back(arg.data());

  try {
    app.parse(static_cast<int>(argv2.size()), argv2.data());
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    app.exit(e);
    return 2;
  }

  try {
    if (gen->parsed()) {
      return run_gen(gen_kind, gen_n, gen_domain, gen_theta, gen_skew, gen_seed,
                     gen_payload, gen_table, gen_format, gen_out);
    }
    if (sort_cmd->parsed()) {
      return run_sort(sort_algo, sort_t, sort_r, sort_seed, sort_in, sort_out,
                      sort_debug_samples);
    }
    if (join_cmd->parsed()) {
      return run_join(join_algo, join_t, join_r, join_seed, join_s, join_tt,
                      join_count_only, join_out);
    }
    if (verify_cmd->parsed()) {
      if (verify_mode == "sort") {
        if (verify_in.empty()) throw ConfigError("verify --mode sort needs -i");
        return verify_sort(verify_in, verify_parts);
      }
      if (verify_s.empty() || verify_tt.empty()) {
        throw ConfigError("verify --mode join needs -s and --t-table");
      }
      return verify_join(verify_s, verify_tt, verify_parts);
    }
    if (report_cmd->parsed()) {
      return run_report(report_in);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
