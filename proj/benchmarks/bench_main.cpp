#include <benchmark/benchmark.h>

#include <vector>

#include "mutlab/abstraction.hpp"
#include "mutlab/rng.hpp"
#include "mutlab/simulation.hpp"
#include "mutlab/subsumption.hpp"
#include "mutlab/synth.hpp"

namespace {

using namespace mutlab;

// Dense random matrix at a given size, same recipe for every run.
KillMatrix sized_matrix(std::size_t mutants, std::size_t tests, std::uint64_t seed) {
  std::vector<std::string> mids, tids;
  for (std::size_t i = 0; i < mutants; ++i) mids.push_back("m" + std::to_string(i));
  for (std::size_t i = 0; i < tests; ++i) tids.push_back("t" + std::to_string(i));
  KillMatrix m(mids, tids);
  Rng rng(seed);
  for (std::size_t mi = 0; mi < mutants; ++mi)
    for (std::size_t ti = 0; ti < tests; ++ti)
      if (rng.unit() < 0.15) m.add_kill(mids[mi], tids[ti], "bench");
  return m;
}

void BM_SubsumingMutants(benchmark::State& state) {
  KillMatrix m = sized_matrix(static_cast<std::size_t>(state.range(0)),
                              static_cast<std::size_t>(state.range(1)), 99);
  for (auto _ : state) {
    auto result = subsuming_mutants(m);
    benchmark::DoNotOptimize(result.labels.fate.data());
  }
}
BENCHMARK(BM_SubsumingMutants)->Args({200, 100})->Args({1000, 200})->Args({3000, 400});

void BM_TokenizeAbstract(benchmark::State& state) {
  std::string source;
  for (std::uint64_t s = 0; s < static_cast<std::uint64_t>(state.range(0)); ++s)
    source += random_unit_source(s);
  for (auto _ : state) {
    auto [tokens, map] = abstract_unit(tokenize(source));
    benchmark::DoNotOptimize(tokens.data());
  }
  state.SetBytesProcessed(static_cast<std::int64_t>(state.iterations() * source.size()));
}
BENCHMARK(BM_TokenizeAbstract)->Arg(1)->Arg(8)->Arg(32);

void BM_SimulationRepetitions(benchmark::State& state) {
  KillMatrix m = sized_matrix(300, 120, 7);
  auto labels = subsuming_mutants(m).labels;
  std::vector<std::size_t> selected;
  for (std::size_t i = 0; i < m.mutant_count(); i += 3) selected.push_back(i);
  SimulationConfig config;
  config.repetitions = static_cast<int>(state.range(0));
  config.master_seed = 11;
  for (auto _ : state) {
    SimulationResult result = repeat_simulations(selected, m, labels, config);
    benchmark::DoNotOptimize(result.repetitions.data());
  }
}
BENCHMARK(BM_SimulationRepetitions)->Arg(10)->Arg(100);

}  // namespace

BENCHMARK_MAIN();
