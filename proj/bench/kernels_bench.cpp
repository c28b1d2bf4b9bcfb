// SPDX-License-Identifier: Apache-2.0
// Serial reference kernels against their OpenMP counterparts.
// Second argument of each benchmark: 0 = serial, 1 = OpenMP.
#include <benchmark/benchmark.h>

#include <map>
#include <vector>

#include "bagchain/harness/simulation.hpp"
#include "bagchain/kernels/exec.hpp"
#include "bagchain/kernels/vote.hpp"
#include "bagchain/ml/synth.hpp"
#include "bagchain/ml/tree.hpp"

using namespace bagchain;

namespace {

kernels::Exec exec_of(const benchmark::State& state) {
  return state.range(1) == 0 ? kernels::Exec::serial : kernels::Exec::parallel;
}

const ml::Dataset& data(std::size_t rows) {
  static std::map<std::size_t, ml::Dataset> cache;
  auto it = cache.find(rows);
  if (it == cache.end()) it = cache.emplace(rows, ml::synthesize_dataset({rows, 10, 5, 1.0, 42})).first;
  return it->second;
}

void BM_Train(benchmark::State& state) {
  const auto& d = data(static_cast<std::size_t>(state.range(0)));
  ml::LearnerSpec spec;
  for (auto _ : state) benchmark::DoNotOptimize(ml::train(d, spec, exec_of(state)));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_Predict(benchmark::State& state) {
  const auto& d = data(static_cast<std::size_t>(state.range(0)));
  const auto tree = ml::train(data(4000), {});
  for (auto _ : state) benchmark::DoNotOptimize(ml::predict(tree, d, exec_of(state)));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_Vote(benchmark::State& state) {
  const auto rows = static_cast<std::size_t>(state.range(0));
  std::vector<std::vector<ml::Label>> ballots(25, std::vector<ml::Label>(rows));
  for (std::size_t m = 0; m < ballots.size(); ++m)
    for (std::size_t i = 0; i < rows; ++i) ballots[m][i] = static_cast<ml::Label>((i * 7 + m * 3) % 5);
  std::vector<std::span<const ml::Label>> spans(ballots.begin(), ballots.end());
  std::vector<ml::Label> out(rows);
  for (auto _ : state) {
    kernels::plurality_vote(exec_of(state), spans, 5, out);
    benchmark::ClobberMemory();
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_Simulation(benchmark::State& state) {
  harness::Scenario sc;
  sc.heights = 3;
  sc.samples = static_cast<std::size_t>(state.range(0));
  sc.parallel = state.range(1) != 0;
  for (auto _ : state) benchmark::DoNotOptimize(harness::run(sc));
}

}  // namespace

BENCHMARK(BM_Train)->ArgsProduct({{2000, 8000}, {0, 1}})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Predict)->ArgsProduct({{10000, 100000}, {0, 1}})->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_Vote)->ArgsProduct({{10000, 100000}, {0, 1}})->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_Simulation)->ArgsProduct({{5000}, {0, 1}})->Unit(benchmark::kMillisecond)->Iterations(2);

BENCHMARK_MAIN();
