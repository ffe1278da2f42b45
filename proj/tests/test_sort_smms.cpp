#include <doctest.h>

#include <cmath>

#include "akmin/datagen.hpp"
#include "akmin/errors.hpp"
#include "akmin/oracle.hpp"
#include "akmin/sort_smms.hpp"
#include "test_support.hpp"

using namespace akmin;

namespace {

std::vector<TaggedRecord> tagged_sorted(std::vector<std::int64_t> keys, int machine) {
  std::sort(keys.begin(), keys.end());
  return tag_duplicates(test::make_records(keys), machine);
}

SampleSet two_machine_set(std::vector<double> a, std::vector<double> b) {
  SampleSet set;
  set.per_machine.push_back(std::move(a));
  set.per_machine.push_back(std::move(b));
  return set;
}

}  // namespace

TEST_CASE("sample_equidepth picks the ceil(j*m/s)-th smallest") {
  const int t = 2;
  SUBCASE("m=6 s=2 takes positions 1,3,6") {
    const auto recs = tagged_sorted({3, 7, 9, 12, 20, 25}, 1);
    const auto samples = sample_equidepth(recs, 2, t);
    REQUIRE(samples.size() == 3);
    CHECK(samples[0] == embed_composite(recs[0].ck, t));
    CHECK(samples[1] == embed_composite(recs[2].ck, t));
    CHECK(samples[2] == embed_composite(recs[5].ck, t));
  }
  SUBCASE("m=8 s=4 takes positions 1,2,4,6,8") {
    const auto recs = tagged_sorted({1, 2, 3, 4, 5, 6, 7, 8}, 1);
    const auto samples = sample_equidepth(recs, 4, t);
    REQUIRE(samples.size() == 5);
    for (std::size_t i = 0; i < 5; ++i) {
      const std::size_t pos = std::vector<std::size_t>{0, 1, 3, 5, 7}[i];
      CHECK(samples[i] == embed_composite(recs[pos].ck, t));
    }
  }
  SUBCASE("m == s is rejected, m < s is rejected") {
    CHECK_THROWS_AS(sample_equidepth(tagged_sorted({4, 8}, 1), 2, t), ConfigError);
    CHECK_THROWS_AS(sample_equidepth(tagged_sorted({1, 2, 3, 4}, 1), 4, t),
                    ConfigError);
  }
}

TEST_CASE("bucket boundaries: symmetric hand trace") {
  // Both machines sample [0,10,20] with m=6, s=2: combined pdf is flat, so
  // the mass-6 cuts land exactly on 10 and 20.
  const auto b = compute_bucket_boundaries(
      two_machine_set({0.0, 10.0, 20.0}, {0.0, 10.0, 20.0}), 2, 6);
  REQUIRE(b.values.size() == 3);
  CHECK(b.values[0] == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(b.values[1] == doctest::Approx(10.0).epsilon(1e-9));
  CHECK(b.values[2] == doctest::Approx(20.0).epsilon(1e-9));
  CHECK(b.sweep_events == 6);  // t*(s+1)
}

TEST_CASE("bucket boundaries: asymmetric hand trace") {
  // Machine 1 samples [0,4,20], machine 2 [0,10,20]. Hand sweep: at event 4
  // the mass is 4.2 and the pdf 0.4875, so the cut is 4 + 1.8/0.4875.
  const auto b = compute_bucket_boundaries(
      two_machine_set({0.0, 4.0, 20.0}, {0.0, 10.0, 20.0}), 2, 6);
  REQUIRE(b.values.size() == 3);
  const double expected = 4.0 + 1.8 / 0.4875;
  CHECK(b.values[0] == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(std::abs(b.values[1] - expected) <= 1e-9 * expected);
  CHECK(std::abs(b.values[2] - 20.0) <= 1e-9 * 20.0);
  CHECK(b.sweep_events == 6);
}

TEST_CASE("bucket boundaries: single machine spans one bucket") {
  SampleSet set;
  set.per_machine.push_back({1.0, 5.0, 42.0});
  const auto b = compute_bucket_boundaries(set, 1, 10);
  REQUIRE(b.values.size() == 2);
  CHECK(b.values[0] == doctest::Approx(1.0));
  CHECK(b.values[1] == doctest::Approx(42.0));
}

TEST_CASE("bucket boundaries reject malformed sample sets") {
  CHECK_THROWS_AS(
      compute_bucket_boundaries(two_machine_set({0.0, 1.0}, {0.0, 1.0, 2.0}), 2, 6),
      ConfigError);
  CHECK_THROWS_AS(
      compute_bucket_boundaries(two_machine_set({0.0, 0.0, 2.0}, {0.0, 1.0, 2.0}), 2, 6),
      ConfigError);
}

TEST_CASE("every bucket's estimated mass is m under the sample pdf") {
  // Independent oracle: integrate the piecewise pdf over each bucket.
  Rng rng(2024, 0);
  for (int trial = 0; trial < 20; ++trial) {
    const int t = 2 + static_cast<int>(rng.bounded(6));
    const int r = 1 + static_cast<int>(rng.bounded(3));
    const int s = r * t;
    const std::uint64_t m = static_cast<std::uint64_t>(s) * (2 + rng.bounded(20));
    SampleSet set;
    for (int i = 0; i < t; ++i) {
      std::vector<double> vals;
      double x = rng.uniform01() * 10.0;
      vals.push_back(x);
      for (int j = 0; j < s; ++j) {
        x += 0.01 + rng.uniform01() * 5.0;
        vals.push_back(x);
      }
      set.per_machine.push_back(std::move(vals));
    }
    const auto b = compute_bucket_boundaries(set, t, m);
    REQUIRE(b.values.size() == static_cast<std::size_t>(t) + 1);
    CHECK(b.sweep_events == static_cast<std::size_t>(t) * (s + 1));
    for (int k = 0; k + 1 <= t; ++k) {
      const double mass = test::estimated_mass(
          set, m, b.values[static_cast<std::size_t>(k)],
          b.values[static_cast<std::size_t>(k) + 1]);
      CHECK(std::abs(mass - static_cast<double>(m)) <=
            1e-6 * static_cast<double>(m));
    }
  }
}

TEST_CASE("smms matches the sequential oracle") {
  SUBCASE("random keys with duplicates") {
    DatasetSpec spec;
    spec.n = 4000;
    spec.key_lo = 0;
    spec.key_hi = 500;  // plenty of duplicates
    spec.seed = 31;
    spec.payload_len = 6;
    const auto data = gen_uniform(spec);
    Cluster cluster(5, 1);
    const auto run = smms_sort(cluster, data, SmmsOptions{2});
    CHECK(test::concat(run.partitions) == seq_sort(data));
  }
  SUBCASE("n not divisible by t pads and strips dummies") {
    DatasetSpec spec;
    spec.n = 1003;
    spec.key_lo = -50;
    spec.key_hi = 50;
    spec.seed = 8;
    spec.payload_len = 4;
    const auto data = gen_uniform(spec);
    Cluster cluster(4, 1);
    const auto run = smms_sort(cluster, data, SmmsOptions{1});
    const auto merged = test::concat(run.partitions);
    CHECK(merged.size() == 1003);
    CHECK(merged == seq_sort(data));
  }
  SUBCASE("all keys equal") {
    const std::vector<std::int64_t> keys(600, 77);
    const auto data = test::make_records(keys);
    Cluster cluster(3, 1);
    const auto run = smms_sort(cluster, data, SmmsOptions{1});
    CHECK(test::concat(run.partitions) == seq_sort(data));
  }
}

TEST_CASE("twelve records on two machines: exact sort, bounded partitions") {
  // Keys are a permutation of 1..12 (n=12, t=2, r=1). With s=2 the
  // equi-depth estimate is coarse, so the split need not be exactly 6/6;
  // the round-3 load bound (1 + 2/r + t^2/n)m still caps each partition.
  const auto data = test::make_records({7, 2, 11, 4, 1, 9, 12, 5, 3, 10, 8, 6});
  Cluster cluster(2, 0);
  const auto run = smms_sort(cluster, data, SmmsOptions{1});
  REQUIRE(run.partitions.size() == 2);
  CHECK(test::keys_of(test::concat(run.partitions)) ==
        std::vector<std::int64_t>{1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12});
  const double limit = (1.0 + 2.0 / 1 + 4.0 / 12.0) * 6.0;
  CHECK(run.partitions[0].size() + run.partitions[1].size() == 12);
  CHECK(static_cast<double>(run.partitions[0].size()) <= limit);
  CHECK(static_cast<double>(run.partitions[1].size()) <= limit);
  // Bucket membership: machine 1 holds exactly the keys below b_1.
  for (const auto& rec : run.partitions[0]) {
    CHECK(static_cast<double>(rec.key) < run.boundaries.values[1]);
  }
  for (const auto& rec : run.partitions[1]) {
    CHECK(static_cast<double>(rec.key) + 1.0 > run.boundaries.values[1]);
  }
}

TEST_CASE("smms round traffic matches the sampling protocol") {
  const int t = 4, r = 2;
  const int s = r * t;
  DatasetSpec spec;
  spec.n = 2000;
  spec.key_lo = 0;
  spec.key_hi = 100000;
  spec.seed = 17;
  spec.payload_len = 0;
  Cluster cluster(t, 3);
  const auto run = smms_sort(cluster, gen_uniform(spec), SmmsOptions{r});
  const auto& log = cluster.round_log();
  REQUIRE(log.size() == 4);
  // Round 1: machine 1 receives t*(s+1) samples.
  CHECK(log[0].received[0] == static_cast<std::uint64_t>(t) * (s + 1));
  for (int i = 1; i < t; ++i) CHECK(log[0].received[static_cast<std::size_t>(i)] == 0);
  CHECK(log[0].sent == std::vector<std::uint64_t>(t, s + 1));
  // Round 2: machine 1 broadcasts t+1 boundaries to each of t machines.
  CHECK(log[1].sent[0] == static_cast<std::uint64_t>(t) * (t + 1));
  CHECK(log[1].received == std::vector<std::uint64_t>(t, t + 1));
  // Round 3: every machine emits its full partition.
  const std::uint64_t m = 2000 / t;
  CHECK(log[2].sent == std::vector<std::uint64_t>(t, m));
  CHECK(log[2].total_received() == 2000);
  // Workloads: m, samples at machine 1, then the merge input.
  CHECK(run.report.rounds[0].w == std::vector<std::uint64_t>(t, m));
  CHECK(run.report.rounds[1].w[0] == static_cast<std::uint64_t>(t) * (s + 1));
  CHECK(run.report.rounds[2].w == log[2].received);
}

TEST_CASE("round-3 load respects the (1 + 2/r + t^2/n)m bound") {
  for (int r : {1, 2}) {
    DatasetSpec spec;
    spec.n = 20000;
    spec.key_lo = 0;
    spec.key_hi = 1 << 20;
    spec.seed = 5 + static_cast<std::uint64_t>(r);
    spec.payload_len = 0;
    const int t = 8;
    Cluster cluster(t, 1);
    const auto run = smms_sort(cluster, gen_uniform(spec), SmmsOptions{r});
    const double m = 20000.0 / t;
    const double limit = (1.0 + 2.0 / r + static_cast<double>(t) * t / 20000.0) * m;
    for (const std::uint64_t w : run.report.rounds[2].w) {
      CHECK(static_cast<double>(w) <= limit);
    }
    REQUIRE(run.report.bound_checks.size() == 1);
    CHECK(run.report.bound_checks[0].name == "theorem1");
    CHECK(run.report.bound_checks[0].pass);
  }
}

TEST_CASE("smms is fully deterministic") {
  DatasetSpec spec;
  spec.n = 3000;
  spec.key_lo = 0;
  spec.key_hi = 999;
  spec.seed = 55;
  spec.payload_len = 4;
  const auto data = gen_uniform(spec);
  auto run_once = [&] {
    Cluster cluster(6, 999);  // cluster seed must not matter
    return smms_sort(cluster, data, SmmsOptions{1});
  };
  const auto a = run_once();
  const auto b = run_once();
  CHECK(a.boundaries.values == b.boundaries.values);
  CHECK(a.partitions == b.partitions);
  CHECK(report_to_csv(a.report) == report_to_csv(b.report));
}

TEST_CASE("smms configuration errors") {
  Cluster tiny(4, 0);
  // m = 16/4 = 4 <= s = 4
  CHECK_THROWS_AS(
      smms_sort(tiny, test::make_records(std::vector<std::int64_t>(16, 1)),
                SmmsOptions{1}),
      ConfigError);
  Cluster cluster(2, 0);
  auto bad = test::make_records({1, 2, 3, 4, 5, 6, 7, 8});
  bad[3].key = std::int64_t{1} << 30;  // outside the embeddable key range
  CHECK_THROWS_AS(smms_sort(cluster, bad, SmmsOptions{1}), ConfigError);
}
