#include <doctest.h>

#include <cmath>
#include <numeric>

#include "akmin/datagen.hpp"
#include "akmin/errors.hpp"
#include "akmin/oracle.hpp"
#include "akmin/sort_terasort.hpp"
#include "test_support.hpp"

using namespace akmin;

TEST_CASE("sample target follows ceil(ln(nt))") {
  CHECK(terasort_sample_target(20, 2) == 4);  // ln 40 = 3.69
  CHECK(terasort_sample_target(100000, 16) == 15);
}

TEST_CASE("algorithm S returns exactly the target count") {
  Rng rng(1, 0);
  std::vector<int> items(200);
  std::iota(items.begin(), items.end(), 0);
  for (int trial = 0; trial < 500; ++trial) {
    const std::uint64_t target = 1 + rng.bounded(200);
    const auto picked = algorithm_s_sample(items, target, rng);
    CHECK(picked.size() == target);
    // Selected items keep scan order and are distinct.
    for (std::size_t i = 1; i < picked.size(); ++i) CHECK(picked[i - 1] < picked[i]);
  }
}

TEST_CASE("algorithm S endpoints: take-all and take-none") {
  Rng rng(2, 0);
  std::vector<int> items{1, 2, 3, 4};
  CHECK(algorithm_s_sample(items, 4, rng) == items);  // forced selection chain
  CHECK(algorithm_s_sample(items, 0, rng).empty());
  CHECK_THROWS_AS(algorithm_s_sample(items, 5, rng), ConfigError);
}

TEST_CASE("algorithm S marginal inclusion is target/m") {
  // Monte-Carlo oracle: every item is included with probability 9/100; over
  // 200000 trials a frequency must stay within four binomial sigmas.
  const std::uint64_t m = 100, target = 9, trials = 200000;
  std::vector<int> items(m);
  std::iota(items.begin(), items.end(), 0);
  std::vector<std::uint64_t> hits(m, 0);
  Rng rng(20240818, 0);
  for (std::uint64_t trial = 0; trial < trials; ++trial) {
    for (int item : algorithm_s_sample(items, target, rng)) {
      ++hits[static_cast<std::size_t>(item)];
    }
  }
  const double p = static_cast<double>(target) / static_cast<double>(m);
  const double sigma = std::sqrt(p * (1.0 - p) / static_cast<double>(trials));
  for (std::uint64_t h : hits) {
    const double freq = static_cast<double>(h) / static_cast<double>(trials);
    CHECK(std::abs(freq - p) <= 4.0 * sigma);
  }
}

TEST_CASE("boundary objects sit at ceil(i*s/t) positions") {
  std::vector<CompositeKey> samples;
  for (int i = 1; i <= 8; ++i) samples.push_back(CompositeKey{i * 10, 1, 0});
  SUBCASE("s=8 t=4 picks the 2nd, 4th, 6th") {
    const auto b = pick_boundary_objects(samples, 4);
    REQUIRE(b.size() == 3);
    CHECK(b[0].key == 20);
    CHECK(b[1].key == 40);
    CHECK(b[2].key == 60);
  }
  SUBCASE("s=t picks every sample but the last") {
    const auto b = pick_boundary_objects(samples, 8);
    REQUIRE(b.size() == 7);
    for (int i = 0; i < 7; ++i) CHECK(b[static_cast<std::size_t>(i)].key == (i + 1) * 10);
  }
  SUBCASE("t=1 yields no boundaries") {
    CHECK(pick_boundary_objects(samples, 1).empty());
  }
  SUBCASE("fewer samples than machines is an error") {
    CHECK_THROWS_AS(pick_boundary_objects(samples, 9), ConfigError);
  }
}

TEST_CASE("terasort output equals the sequential oracle") {
  for (std::uint64_t seed : {1ULL, 2ULL, 3ULL}) {
    DatasetSpec spec;
    spec.n = 5000;
    spec.key_lo = 0;
    spec.key_hi = 800;  // duplicates included
    spec.seed = seed;
    spec.payload_len = 5;
    const auto data = gen_uniform(spec);
    Cluster cluster(7, seed * 31);
    const auto run = terasort(cluster, data);
    CHECK(test::concat(run.partitions) == seq_sort(data));
  }
}

TEST_CASE("terasort handles uneven partitions") {
  DatasetSpec spec;
  spec.n = 1003;
  spec.key_lo = -99;
  spec.key_hi = 99;
  spec.seed = 4;
  spec.payload_len = 3;
  const auto data = gen_uniform(spec);
  Cluster cluster(4, 9);
  const auto run = terasort(cluster, data);
  CHECK(test::concat(run.partitions) == seq_sort(data));
}

TEST_CASE("every machine contributes exactly ceil(ln(nt)) samples") {
  DatasetSpec spec;
  spec.n = 4000;
  spec.key_lo = 0;
  spec.key_hi = 1 << 20;
  spec.seed = 12;
  spec.payload_len = 0;
  const int t = 8;
  const std::uint64_t c = terasort_sample_target(spec.n, t);
  Cluster cluster(t, 5);
  TerasortOptions options;
  options.capture_samples = true;
  const auto run = terasort(cluster, gen_uniform(spec), options);
  REQUIRE(run.samples.size() == static_cast<std::size_t>(t));
  for (const auto& samples : run.samples) CHECK(samples.size() == c);
  const auto& log = cluster.round_log();
  CHECK(log[0].received[0] == static_cast<std::uint64_t>(t) * c);
  CHECK(log[0].sent == std::vector<std::uint64_t>(t, c));
  // Boundary broadcast: t-1 objects to each machine.
  CHECK(log[1].sent[0] == static_cast<std::uint64_t>(t) * (t - 1));
}

TEST_CASE("routing uses left-open right-closed intervals") {
  // Keys equal to a boundary object go to the lower machine; strictly
  // greater keys to the next.
  std::vector<CompositeKey> bounds{{10, 1, 0}, {20, 1, 0}};
  auto dest = [&](CompositeKey ck) {
    const auto it = std::lower_bound(bounds.begin(), bounds.end(), ck);
    return 1 + static_cast<int>(it - bounds.begin());
  };
  CHECK(dest({5, 1, 0}) == 1);
  CHECK(dest({10, 1, 0}) == 1);   // equal to b_1, stays low
  CHECK(dest({10, 1, 1}) == 2);   // same key, later duplicate is "greater"
  CHECK(dest({20, 1, 0}) == 2);
  CHECK(dest({25, 1, 0}) == 3);
}

TEST_CASE("counter tagging equals stable-sort tagging") {
  DatasetSpec spec;
  spec.n = 2000;
  spec.key_lo = 0;
  spec.key_hi = 50;
  spec.seed = 77;
  spec.payload_len = 4;
  const auto data = gen_uniform(spec);
  // Reference: stable sort then positional tagging.
  auto sorted = data;
  std::stable_sort(sorted.begin(), sorted.end(),
                   [](const Record& a, const Record& b) { return a.key < b.key; });
  auto reference = tag_duplicates(sorted, 3);
  // Terasort with t=1 routes everything through the counter tagging and a
  // final sort; its output order realizes the stable order.
  Cluster cluster(1, 0);
  const auto run = terasort(cluster, data);
  REQUIRE(run.partitions.size() == 1);
  REQUIRE(run.partitions[0].size() == reference.size());
  for (std::size_t i = 0; i < reference.size(); ++i) {
    CHECK(run.partitions[0][i] == reference[i].rec);
  }
}

TEST_CASE("small inputs carry the 5m+1 caveat note and still sort") {
  // n=7 < 4t=8 yet c = ceil(ln 14) = 3 <= m = 3, so the run proceeds with
  // the guarantee flagged as void.
  Cluster cluster(2, 0);
  const auto run = terasort(cluster, test::make_records({5, 3, 9, 1, 2, 8, 7}));
  REQUIRE(!run.notes.empty());
  CHECK(run.notes[0].find("n < 4t") != std::string::npos);
  CHECK(test::keys_of(test::concat(run.partitions)) ==
        std::vector<std::int64_t>{1, 2, 3, 5, 7, 8, 9});
}

TEST_CASE("sample target beyond the smallest partition is rejected") {
  Cluster cluster(4, 0);
  // n=8, t=4: c = ceil(ln 32) = 4 > m = 2.
  CHECK_THROWS_AS(terasort(cluster, test::make_records({5, 3, 9, 1, 2, 8, 7, 4})),
                  ConfigError);
}

TEST_CASE("terasort per-seed determinism") {
  const auto data = [&] {
    DatasetSpec spec;
    spec.n = 3000;
    spec.key_lo = 0;
    spec.key_hi = 5000;
    spec.seed = 6;
    spec.payload_len = 4;
    return gen_uniform(spec);
  }();
  auto run_once = [&](std::uint64_t seed) {
    Cluster cluster(5, seed);
    return terasort(cluster, data);
  };
  CHECK(run_once(41).partitions == run_once(41).partitions);
  // A different seed gives different boundaries almost surely.
  CHECK(run_once(41).boundaries != run_once(42).boundaries);
}
