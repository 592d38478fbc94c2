#include <benchmark/benchmark.h>

#include "mgt/analysis.hpp"

namespace {

void BM_CharacteristicRoots(benchmark::State& state) {
  const auto params = mgt::MgtParameters::create(1, 2, 1, 1);
  double mu = 1e-2;
  for (auto _ : state) {
    benchmark::DoNotOptimize(mgt::characteristic_roots(params, mu));
    mu = mu < 1e4 ? mu * 1.5 : 1e-2;
  }
}
BENCHMARK(BM_CharacteristicRoots);

}  // namespace
