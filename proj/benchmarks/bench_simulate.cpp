#include <benchmark/benchmark.h>

#include "mgt/dynamics.hpp"

namespace {

mgt::InitialState bump(std::size_t n) {
  mgt::InitialState init;
  init.u0.assign(n, 0.0);
  init.u1.assign(n, 0.0);
  init.u2.assign(n, 0.0);
  init.u0[0] = 1.0;
  return init;
}

void BM_SimulateMemoryless(benchmark::State& state) {
  const auto params = mgt::MgtParameters::create(1, 2, 1, 1);
  const auto spectrum =
      mgt::OperatorSpectrum::dirichlet_1d(3.14159265358979323846, state.range(0));
  const auto grid = mgt::TimeGrid::create(1.0, 1e-3);
  const auto init = bump(spectrum.size());
  for (auto _ : state) {
    auto traj = mgt::simulate(params, spectrum, mgt::MemoryKernel::zero(), init,
                              grid, mgt::IntegrationPath::prony_aux);
    benchmark::DoNotOptimize(traj.u(grid.n_steps, 0));
  }
  state.SetItemsProcessed(state.iterations() * grid.n_steps * spectrum.size());
}
BENCHMARK(BM_SimulateMemoryless)->Arg(8)->Arg(32)->Arg(64);

void BM_SimulateType1(benchmark::State& state) {
  const auto params = mgt::MgtParameters::create(1, 2, 1, 1, mgt::MemoryType::type1);
  const auto spectrum =
      mgt::OperatorSpectrum::dirichlet_1d(3.14159265358979323846, 8);
  const auto kernel = mgt::MemoryKernel::prony({0.2}, {2.0});
  const auto grid = mgt::TimeGrid::create(1.0, 1e-3);
  const auto init = bump(8);
  const auto path = state.range(0) == 0 ? mgt::IntegrationPath::prony_aux
                                        : mgt::IntegrationPath::quadrature;
  for (auto _ : state) {
    auto traj = mgt::simulate(params, spectrum, kernel, init, grid, path);
    benchmark::DoNotOptimize(traj.u(grid.n_steps, 0));
  }
}
BENCHMARK(BM_SimulateType1)->Arg(0)->Arg(1);

}  // namespace
