#include <benchmark/benchmark.h>

#include "tbm/empirical_copula.hpp"
#include "tbm/multipliers.hpp"
#include "tbm/simulate.hpp"
#include "tbm/specified_test.hpp"
#include "tbm/unspecified_test.hpp"

namespace {

using namespace tbm;

TimeSeriesSample clayton_sample(std::size_t n) {
  Engine rng = make_engine(1);
  return TimeSeriesSample(copula_sample({CopulaFamily::Clayton, 1.0, 2}, n, rng));
}

void BM_Multipliers(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto config = MultiplierConfig::with_base(
      {KernelKind::Triangular, static_cast<int>(state.range(1))}, BaseDistribution::Normal);
  Engine rng = make_engine(2);
  for (auto _ : state) benchmark::DoNotOptimize(generate_multipliers(config, n, rng));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Multipliers)->Args({200, 4})->Args({800, 6})->Args({100000, 3});

void BM_PseudoObservations(benchmark::State& state) {
  const auto sample = clayton_sample(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(pseudo_observations(sample));
}
BENCHMARK(BM_PseudoObservations)->Arg(100)->Arg(800)->Arg(100000);

void BM_SpecifiedReplicate(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const SpecifiedTestReplicator rep(clayton_sample(n), 0.5);
  const auto config = MultiplierConfig::with_base({KernelKind::Triangular, 3},
                                                  BaseDistribution::Normal);
  Engine rng = make_engine(3);
  const auto stream = generate_multipliers(config, n, rng);
  for (auto _ : state) benchmark::DoNotOptimize(rep.replicate(stream));
}
BENCHMARK(BM_SpecifiedReplicate)->Arg(100)->Arg(200);

void BM_UnspecifiedReplicate(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const UnspecifiedTestReplicator rep(pseudo_observations(clayton_sample(n)));
  const auto config = MultiplierConfig::with_base({KernelKind::Triangular, 5},
                                                  BaseDistribution::Normal);
  Engine rng = make_engine(4);
  const auto stream = generate_multipliers(config, n, rng);
  for (auto _ : state) benchmark::DoNotOptimize(rep.replicate(stream));
}
BENCHMARK(BM_UnspecifiedReplicate)->Arg(400)->Arg(800);

}  // namespace
BENCHMARK_MAIN();
