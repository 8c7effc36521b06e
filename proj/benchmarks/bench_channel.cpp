#include <benchmark/benchmark.h>

#include "hybridiq/hybrid_channel.hpp"
#include "hybridiq/operator_core.hpp"

namespace {

using namespace hybridiq;

void BM_Apply(benchmark::State& state) {
  const auto cells = static_cast<std::size_t>(state.range(0));
  const int qdim = static_cast<int>(state.range(1));
  Rng rng(1);
  const ClassicalSpace space = ClassicalSpace::counting(cells);
  const HybridChannel ch = random_channel(space, space, qdim, qdim, 2, rng);
  const HybridState w = random_state(space, qdim, rng);
  for (auto _ : state) benchmark::DoNotOptimize(apply(ch, w));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(cells * cells));
}
BENCHMARK(BM_Apply)->Args({4, 2})->Args({16, 4})->Args({64, 4})->Args({16, 16});

void BM_Compose(benchmark::State& state) {
  const auto cells = static_cast<std::size_t>(state.range(0));
  Rng rng(2);
  const ClassicalSpace space = ClassicalSpace::counting(cells);
  const HybridChannel a = random_channel(space, space, 3, 3, 2, rng);
  const HybridChannel b = random_channel(space, space, 3, 3, 2, rng);
  for (auto _ : state) benchmark::DoNotOptimize(compose(b, a));
}
BENCHMARK(BM_Compose)->Arg(4)->Arg(8)->Arg(16);

void BM_Eig(benchmark::State& state) {
  const int dim = static_cast<int>(state.range(0));
  Rng rng(3);
  const CMatrix rho = random_density(dim, rng);
  for (auto _ : state) benchmark::DoNotOptimize(hermitian_eig(rho));
}
BENCHMARK(BM_Eig)->RangeMultiplier(2)->Range(2, 64);

}  // namespace
