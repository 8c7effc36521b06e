#include <benchmark/benchmark.h>

#include "hybridiq/correlations.hpp"

namespace {

using namespace hybridiq;

void BM_MutualInformation(benchmark::State& state) {
  const auto cells = static_cast<std::size_t>(state.range(0));
  const int qdim = static_cast<int>(state.range(1));
  Rng rng(4);
  const HybridState w = random_state(ClassicalSpace::counting(cells), qdim, rng);
  for (auto _ : state) benchmark::DoNotOptimize(mutual_information(w));
}
BENCHMARK(BM_MutualInformation)->Args({4, 2})->Args({16, 4})->Args({64, 8});

}  // namespace
