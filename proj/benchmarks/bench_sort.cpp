#include <benchmark/benchmark.h>

#include "akmin/datagen.hpp"
#include "akmin/oracle.hpp"
#include "akmin/sort_smms.hpp"
#include "akmin/sort_terasort.hpp"

using namespace akmin;

namespace {

std::vector<Record> dataset(std::uint64_t n) {
  DatasetSpec spec;
  spec.kind = DatasetKind::uniform;
  spec.n = n;
  spec.key_lo = 1;
  spec.key_hi = 12000000;
  spec.seed = 7;
  spec.payload_len = 8;
  return generate(spec);
}

void BM_SeqSort(benchmark::State& state) {
  const auto data = dataset(static_cast<std::uint64_t>(state.range(0)));
  for (auto _ : state) {
    auto sorted = seq_sort(data);
    benchmark::DoNotOptimize(sorted.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_SeqSort)->Arg(100000)->Arg(1000000)->Unit(benchmark::kMillisecond);

void BM_SmmsSort(benchmark::State& state) {
  const auto data = dataset(static_cast<std::uint64_t>(state.range(0)));
  const int t = static_cast<int>(state.range(1));
  for (auto _ : state) {
    Cluster cluster(t, 7);
    auto run = smms_sort(cluster, data, SmmsOptions{2});
    benchmark::DoNotOptimize(run.partitions.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_SmmsSort)
    ->Args({100000, 4})
    ->Args({100000, 16})
    ->Args({1000000, 16})
    ->Unit(benchmark::kMillisecond);

void BM_Terasort(benchmark::State& state) {
  const auto data = dataset(static_cast<std::uint64_t>(state.range(0)));
  const int t = static_cast<int>(state.range(1));
  std::uint64_t seed = 0;
  for (auto _ : state) {
    Cluster cluster(t, ++seed);
    auto run = terasort(cluster, data);
    benchmark::DoNotOptimize(run.partitions.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Terasort)
    ->Args({100000, 4})
    ->Args({100000, 16})
    ->Args({1000000, 16})
    ->Unit(benchmark::kMillisecond);

void BM_BucketBoundaries(benchmark::State& state) {
  const int t = static_cast<int>(state.range(0));
  const int r = 2;
  const int s = r * t;
  const std::uint64_t m = 100000;
  SampleSet set;
  Rng rng(5, 0);
  for (int i = 0; i < t; ++i) {
    std::vector<double> vals;
    double x = 0.0;
    for (int j = 0; j <= s; ++j) {
      x += 0.5 + rng.uniform01();
      vals.push_back(x);
    }
    set.per_machine.push_back(std::move(vals));
  }
  for (auto _ : state) {
    auto bounds = compute_bucket_boundaries(set, t, m);
    benchmark::DoNotOptimize(bounds.values.data());
  }
}
BENCHMARK(BM_BucketBoundaries)->Arg(16)->Arg(64)->Arg(255);

}  // namespace

BENCHMARK_MAIN();
