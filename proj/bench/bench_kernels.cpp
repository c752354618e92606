// OpenMP kernels against their serial references.

#include <benchmark/benchmark.h>

#include <vector>

#include "scolab/instance_spec.hpp"
#include "scolab/kernels.hpp"

using namespace scolab;

namespace {

struct SweepFixture {
  std::unique_ptr<ProblemInstance> instance;
  CellOptions options;
  std::vector<kernels::ReplicateTask> tasks;

  explicit SweepFixture(std::size_t replicates) {
    const CellKey key{1.0, 1024, 64};
    instance = make_instance(parse_instance_spec("coupled{C=1}"), {key.eta, static_cast<double>(key.T), key.n});
    options.algorithm = Algorithm::SGD;
    options.replicates = replicates;
    options.base_seed = 7;
    for (std::size_t r = 0; r < replicates; ++r) tasks.push_back({instance.get(), key, &options, r});
  }
};

void BM_ReplicatesSerial(benchmark::State& state) {
  SweepFixture f(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(kernels::run_replicates_serial(f.tasks));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_ReplicatesOmp(benchmark::State& state) {
  SweepFixture f(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(kernels::run_replicates_omp(f.tasks, 0));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_EventHitsSerial(benchmark::State& state) {
  const auto inst = make_instance(parse_instance_spec("coupled{n=8}"));
  const auto trials = static_cast<std::uint64_t>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(kernels::count_event_hits_serial(*inst, 8, Event::Permutation, trials, 11));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_EventHitsOmp(benchmark::State& state) {
  const auto inst = make_instance(parse_instance_spec("coupled{n=8}"));
  const auto trials = static_cast<std::uint64_t>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(kernels::count_event_hits_omp(*inst, 8, Event::Permutation, trials, 11, 0));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

}  // namespace

BENCHMARK(BM_ReplicatesSerial)->Arg(16)->Arg(128)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ReplicatesOmp)->Arg(16)->Arg(128)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_EventHitsSerial)->Arg(1 << 16)->Arg(1 << 20)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_EventHitsOmp)->Arg(1 << 16)->Arg(1 << 20)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
