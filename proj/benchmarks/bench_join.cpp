#include <benchmark/benchmark.h>

#include "akmin/datagen.hpp"
#include "akmin/join_rand.hpp"
#include "akmin/join_stat.hpp"
#include "akmin/oracle.hpp"

using namespace akmin;

namespace {

std::pair<std::vector<Record>, std::vector<Record>> scalar_tables(std::uint64_t n) {
  DatasetSpec spec;
  spec.kind = DatasetKind::scalar_skew;
  spec.n = n;
  spec.payload_len = 8;
  spec.table = TableTag::s;
  spec.skew_count = n / 10;
  spec.seed = 1;
  auto s = generate(spec);
  spec.table = TableTag::t;
  spec.skew_count = n / 50;
  spec.seed = 2;
  auto t = generate(spec);
  return {std::move(s), std::move(t)};
}

std::pair<std::vector<Record>, std::vector<Record>> zipf_tables(std::uint64_t n,
                                                                double theta) {
  DatasetSpec spec;
  spec.kind = DatasetKind::zipf;
  spec.n = n;
  spec.key_lo = 1000;
  spec.key_hi = 1999;
  spec.theta = theta;
  spec.payload_len = 8;
  spec.table = TableTag::s;
  spec.seed = 3;
  auto s = generate(spec);
  spec.table = TableTag::t;
  spec.seed = 4;
  auto t = generate(spec);
  return {std::move(s), std::move(t)};
}

void BM_OracleJoinCount(benchmark::State& state) {
  const auto [s, t] = zipf_tables(static_cast<std::uint64_t>(state.range(0)), 0.0);
  for (auto _ : state) {
    auto join = oracle_join(s, t, /*materialize=*/false);
    benchmark::DoNotOptimize(join.summary.total);
  }
}
BENCHMARK(BM_OracleJoinCount)->Arg(10000)->Arg(50000)->Unit(benchmark::kMillisecond);

void BM_RandJoinScalar(benchmark::State& state) {
  const auto [s, t] = scalar_tables(static_cast<std::uint64_t>(state.range(0)));
  const int machines = static_cast<int>(state.range(1));
  std::uint64_t seed = 0;
  for (auto _ : state) {
    Cluster cluster(machines, ++seed);
    auto run = randjoin(cluster, s, t, JoinOptions{.count_only = true});
    benchmark::DoNotOptimize(run.total_output);
  }
}
BENCHMARK(BM_RandJoinScalar)
    ->Args({10000, 15})
    ->Args({50000, 15})
    ->Unit(benchmark::kMillisecond);

void BM_StatJoinScalar(benchmark::State& state) {
  const auto [s, t] = scalar_tables(static_cast<std::uint64_t>(state.range(0)));
  const int machines = static_cast<int>(state.range(1));
  for (auto _ : state) {
    Cluster cluster(machines, 0);
    auto run = statjoin(cluster, s, t, JoinOptions{.count_only = true});
    benchmark::DoNotOptimize(run.total_output);
  }
}
BENCHMARK(BM_StatJoinScalar)
    ->Args({10000, 15})
    ->Args({50000, 15})
    ->Unit(benchmark::kMillisecond);

void BM_StatJoinZipf(benchmark::State& state) {
  const auto [s, t] =
      zipf_tables(static_cast<std::uint64_t>(state.range(0)),
                  static_cast<double>(state.range(1)) / 10.0);
  for (auto _ : state) {
    Cluster cluster(15, 0);
    auto run = statjoin(cluster, s, t, JoinOptions{.count_only = true});
    benchmark::DoNotOptimize(run.total_output);
  }
}
BENCHMARK(BM_StatJoinZipf)
    ->Args({10000, 0})
    ->Args({10000, 7})
    ->Args({10000, 10})
    ->Unit(benchmark::kMillisecond);

void BM_ZipfGen(benchmark::State& state) {
  DatasetSpec spec;
  spec.kind = DatasetKind::zipf;
  spec.n = static_cast<std::uint64_t>(state.range(0));
  spec.key_lo = 1000;
  spec.key_hi = 1999;
  spec.theta = 0.0;
  spec.payload_len = 8;
  spec.seed = 5;
  for (auto _ : state) {
    auto recs = generate(spec);
    benchmark::DoNotOptimize(recs.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_ZipfGen)->Arg(100000)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
