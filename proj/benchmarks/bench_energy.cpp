#include <benchmark/benchmark.h>

#include "mgt/energy.hpp"

namespace {

mgt::Trajectory make_run(std::size_t n_modes, double t_end) {
  const auto params = mgt::MgtParameters::create(1, 2, 1, 1, mgt::MemoryType::type1);
  const auto spectrum =
      mgt::OperatorSpectrum::dirichlet_1d(3.14159265358979323846, n_modes);
  const auto kernel = mgt::MemoryKernel::prony({0.2}, {2.0});
  const auto grid = mgt::TimeGrid::create(t_end, 1e-3);
  mgt::InitialState init;
  init.u0.assign(n_modes, 0.5);
  init.u1.assign(n_modes, 0.0);
  init.u2.assign(n_modes, 0.25);
  return mgt::simulate(params, spectrum, kernel, init, grid,
                       mgt::IntegrationPath::prony_aux);
}

// full ledger, exponential-sum fast path
void BM_EvaluateLedger(benchmark::State& state) {
  const auto traj = make_run(state.range(0), 5.0);
  for (auto _ : state) {
    auto ledger = mgt::evaluate_ledger(traj);
    benchmark::DoNotOptimize(ledger.at(mgt::LedgerField::F1).back());
  }
  state.SetItemsProcessed(state.iterations() * traj.n_points());
}
BENCHMARK(BM_EvaluateLedger)->Arg(4)->Arg(16);

// one-shot direct quadrature of the history functional
void BM_GCircleDirect(benchmark::State& state) {
  const auto traj = make_run(4, 2.0);
  const auto history = traj.history_u();
  const auto kernel = traj.kernel();
  for (auto _ : state) {
    benchmark::DoNotOptimize(mgt::g_circ(kernel, history, traj.grid().h,
                                         &traj.spectrum(), 2.0));
  }
}
BENCHMARK(BM_GCircleDirect);

}  // namespace
