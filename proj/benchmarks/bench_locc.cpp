#include <benchmark/benchmark.h>

#include "hybridiq/locc.hpp"

namespace {

using namespace hybridiq;

void BM_LoccRun(benchmark::State& state) {
  const int rounds = static_cast<int>(state.range(0));
  Rng rng(5);
  const LoccProtocol p = random_protocol(2, 2, rounds, 3, rng);
  const CMatrix rho = random_density(4, rng);
  for (auto _ : state) benchmark::DoNotOptimize(run(p, rho));
}
BENCHMARK(BM_LoccRun)->DenseRange(1, 4);

void BM_LoccAsChannels(benchmark::State& state) {
  Rng rng(6);
  const LoccProtocol p = random_protocol(2, 2, static_cast<int>(state.range(0)), 2, rng);
  for (auto _ : state) benchmark::DoNotOptimize(as_hybrid_channels(p));
}
BENCHMARK(BM_LoccAsChannels)->DenseRange(1, 3);

}  // namespace
