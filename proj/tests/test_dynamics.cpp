#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <vector>

#include "mgt/dynamics.hpp"
#include "mgt/errors.hpp"

using namespace mgt;

namespace {

InitialState bump(std::size_t n_modes) {
  InitialState init;
  init.u0.assign(n_modes, 0.0);
  init.u1.assign(n_modes, 0.0);
  init.u2.assign(n_modes, 0.0);
  init.u0[0] = 1.0;
  return init;
}

double max_state_diff(const Trajectory& a, const Trajectory& b) {
  double worst = 0.0;
  for (std::size_t s = 0; s < a.n_points(); ++s)
    for (std::size_t i = 0; i < a.n_modes(); ++i) {
      worst = std::max(worst, std::abs(a.u(s, i) - b.u(s, i)));
      worst = std::max(worst, std::abs(a.ut(s, i) - b.ut(s, i)));
      worst = std::max(worst, std::abs(a.utt(s, i) - b.utt(s, i)));
    }
  return worst;
}

double max_state_scale(const Trajectory& a) {
  double worst = 0.0;
  for (std::size_t s = 0; s < a.n_points(); ++s)
    for (std::size_t i = 0; i < a.n_modes(); ++i)
      worst = std::max({worst, std::abs(a.u(s, i)), std::abs(a.ut(s, i)),
                        std::abs(a.utt(s, i))});
  return worst;
}

}  // namespace

TEST_CASE("time grid validation") {
  const auto g = TimeGrid::create(1.0, 1e-3);
  CHECK(g.n_steps == 1000);
  CHECK_THROWS_AS(TimeGrid::create(1.0, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(TimeGrid::create(-1.0, 0.1), std::invalid_argument);
  CHECK_THROWS_AS(TimeGrid::create(1.0, 0.3), std::invalid_argument);
}

TEST_CASE("zero initial data stays identically zero") {
  const auto params = MgtParameters::create(1, 2, 1, 1, MemoryType::type1);
  const auto spectrum = OperatorSpectrum::from_eigenvalues({1.0, 4.0});
  const auto kernel = MemoryKernel::prony({0.2}, {2.0});
  const auto grid = TimeGrid::create(1.0, 1e-2);
  InitialState zero;
  zero.u0.assign(2, 0.0);
  zero.u1.assign(2, 0.0);
  zero.u2.assign(2, 0.0);
  for (auto path : {IntegrationPath::prony_aux, IntegrationPath::quadrature}) {
    const auto traj = simulate(params, spectrum, kernel, zero, grid, path);
    CHECK(max_state_scale(traj) == 0.0);
  }
}

TEST_CASE("conservative single mode holds its energy") {
  // all parameters one, memoryless: the natural critical energy
  // b|A^{1/2}(u_t+ku)|^2 + tau|u_tt+ku_t|^2 stays constant
  const auto params = MgtParameters::create(1, 1, 1, 1);
  const auto spectrum = OperatorSpectrum::from_eigenvalues({1.0});
  const auto grid = TimeGrid::create(50.0, 1e-3);
  const auto traj = simulate(params, spectrum, MemoryKernel::zero(), bump(1), grid,
                             IntegrationPath::prony_aux);
  const double k = 1.0;
  auto e0cr = [&](std::size_t s) {
    const double z1 = traj.ut(s, 0) + k * traj.u(s, 0);
    const double z2 = traj.utt(s, 0) + k * traj.ut(s, 0);
    return 1.0 * z1 * z1 + 1.0 * z2 * z2;
  };
  const double e0 = e0cr(0);
  double drift = 0.0;
  for (std::size_t s = 0; s < traj.n_points(); ++s)
    drift = std::max(drift, std::abs(e0cr(s) - e0));
  CHECK(drift / e0 < 1e-8);
}

TEST_CASE("cross-path agreement at second order") {
  const auto params = MgtParameters::create(1, 2, 1, 1, MemoryType::type1);
  const auto spectrum = OperatorSpectrum::from_eigenvalues({1.0});
  const auto kernel = MemoryKernel::prony({0.2}, {2.0});
  const InitialState init = bump(1);

  auto diff_at = [&](double h) {
    const auto grid = TimeGrid::create(2.0, h);
    const auto a = simulate(params, spectrum, kernel, init, grid,
                            IntegrationPath::prony_aux);
    const auto b = simulate(params, spectrum, kernel, init, grid,
                            IntegrationPath::quadrature);
    return max_state_diff(a, b);
  };
  const double d1 = diff_at(2e-3);
  const double d2 = diff_at(1e-3);
  CHECK(d1 / d2 > 2.2);   // second-order shrinkage
  CHECK(d1 / d2 < 7.0);
  CHECK(d2 < 5.0 * 1e-6);  // state scale is O(1) for this run
}

TEST_CASE("linearity in the initial data") {
  const auto params = MgtParameters::create(1, 2, 1, 1, MemoryType::type1);
  const auto spectrum = OperatorSpectrum::from_eigenvalues({1.0, 4.0});
  const auto kernel = MemoryKernel::prony({0.2}, {2.0});
  const auto grid = TimeGrid::create(1.0, 1e-3);
  InitialState init;
  init.u0 = {0.3, -0.7};
  init.u1 = {1.1, 0.2};
  init.u2 = {0.0, 0.5};
  InitialState scaled = init;
  const double c = 3.7;
  for (auto* v : {&scaled.u0, &scaled.u1, &scaled.u2})
    for (double& x : *v) x *= c;

  const auto a = simulate(params, spectrum, kernel, init, grid, IntegrationPath::prony_aux);
  const auto b = simulate(params, spectrum, kernel, scaled, grid, IntegrationPath::prony_aux);
  const double scale = max_state_scale(b);
  for (std::size_t s = 0; s < a.n_points(); s += 100)
    for (std::size_t i = 0; i < 2; ++i) {
      CHECK(std::abs(c * a.u(s, i) - b.u(s, i)) <= 1e-12 * scale);
      CHECK(std::abs(c * a.ut(s, i) - b.ut(s, i)) <= 1e-12 * scale);
      CHECK(std::abs(c * a.utt(s, i) - b.utt(s, i)) <= 1e-12 * scale);
    }
}

TEST_CASE("modes decouple exactly") {
  const auto params = MgtParameters::create(1, 2, 1, 1, MemoryType::type1);
  const auto spectrum = OperatorSpectrum::from_eigenvalues({1.0, 4.0, 9.0});
  const auto kernel = MemoryKernel::prony({0.2}, {2.0});
  const auto grid = TimeGrid::create(0.5, 1e-3);
  InitialState init;
  init.u0 = {0.3, -0.7, 0.1};
  init.u1 = {1.1, 0.2, -0.4};
  init.u2 = {0.0, 0.5, 0.9};

  const auto joint = simulate(params, spectrum, kernel, init, grid,
                              IntegrationPath::prony_aux);
  for (std::size_t i = 0; i < 3; ++i) {
    const auto single_spec =
        OperatorSpectrum::from_eigenvalues({spectrum.eigenvalues[i]});
    InitialState single_init;
    single_init.u0 = {init.u0[i]};
    single_init.u1 = {init.u1[i]};
    single_init.u2 = {init.u2[i]};
    const auto alone = simulate(params, single_spec, kernel, single_init, grid,
                                IntegrationPath::prony_aux);
    for (std::size_t s = 0; s < joint.n_points(); s += 50) {
      CHECK(joint.u(s, i) == alone.u(s, 0));
      CHECK(joint.ut(s, i) == alone.ut(s, 0));
      CHECK(joint.utt(s, i) == alone.utt(s, 0));
    }
  }
}

TEST_CASE("deterministic across thread counts") {
  const auto params = MgtParameters::create(1, 2, 1, 1, MemoryType::type1);
  const auto spectrum = OperatorSpectrum::dirichlet_1d(3.14159265358979323846, 8);
  const auto kernel = MemoryKernel::prony({0.2}, {2.0});
  const auto grid = TimeGrid::create(0.5, 1e-3);
  InitialState init;
  init.u0.assign(8, 0.25);
  init.u1.assign(8, -0.5);
  init.u2.assign(8, 0.125);

  SimulateOptions one, four;
  one.threads = 1;
  four.threads = 4;
  const auto a = simulate(params, spectrum, kernel, init, grid,
                          IntegrationPath::prony_aux, one);
  const auto b = simulate(params, spectrum, kernel, init, grid,
                          IntegrationPath::prony_aux, four);
  CHECK(max_state_diff(a, b) == 0.0);
}

TEST_CASE("step-refinement orders per path") {
  const auto params = MgtParameters::create(1, 2, 1, 1, MemoryType::type1);
  const auto spectrum = OperatorSpectrum::from_eigenvalues({1.0});
  const auto kernel = MemoryKernel::prony({0.2}, {2.0});
  const InitialState init = bump(1);

  auto solve_u_end = [&](double h, IntegrationPath path) {
    const auto grid = TimeGrid::create(1.0, h);
    const auto traj = simulate(params, spectrum, kernel, init, grid, path);
    return traj.u(traj.n_points() - 1, 0);
  };

  const double ref = solve_u_end(1e-4, IntegrationPath::prony_aux);
  for (auto [path, lo, hi] :
       {std::tuple{IntegrationPath::prony_aux, 3.2, 4.8},
        std::tuple{IntegrationPath::quadrature, 1.6, 2.4}}) {
    std::vector<double> errs;
    for (double h : {8e-3, 4e-3, 2e-3})
      errs.push_back(std::abs(solve_u_end(h, path) - ref));
    const double order1 = std::log2(errs[0] / errs[1]);
    const double order2 = std::log2(errs[1] / errs[2]);
    const double order = 0.5 * (order1 + order2);
    CHECK(order > lo);
    CHECK(order < hi);
  }
}

TEST_CASE("auxiliary states reproduce the trapezoid convolution") {
  const auto params = MgtParameters::create(1, 2, 1, 1, MemoryType::type1);
  const auto spectrum = OperatorSpectrum::from_eigenvalues({1.0, 4.0});
  const auto kernel = MemoryKernel::prony({0.3, 0.2}, {1.0, 3.0});
  InitialState init;
  init.u0 = {1.0, -0.5};
  init.u1 = {0.0, 0.3};
  init.u2 = {0.2, 0.0};

  auto aux_vs_direct = [&](double h) {
    const auto grid = TimeGrid::create(1.0, h);
    const auto traj = simulate(params, spectrum, kernel, init, grid,
                               IntegrationPath::prony_aux);
    // direct trapezoid of int g(t-s) u_i(s) ds from the stored history
    const std::size_t n = traj.n_points() - 1;
    double worst = 0.0;
    for (std::size_t i = 0; i < 2; ++i) {
      double direct = 0.0;
      for (std::size_t s = 0; s <= n; ++s) {
        const double weight = (s == 0 || s == n) ? 0.5 : 1.0;
        direct += weight * kernel.value(grid.time(n) - grid.time(s)) * traj.u(s, i);
      }
      direct *= h;
      double aux_sum = 0.0;
      for (std::size_t j = 0; j < traj.n_aux_terms(); ++j) aux_sum += traj.aux(n, i, j);
      worst = std::max(worst, std::abs(aux_sum - direct));
      CHECK(traj.conv(n, i) == doctest::Approx(aux_sum).epsilon(1e-13));
    }
    return worst;
  };
  const double d1 = aux_vs_direct(2e-2);
  const double d2 = aux_vs_direct(1e-2);
  CHECK(d1 / d2 > 3.0);  // trapezoid error dominates: O(h^2)
  CHECK(d1 / d2 < 5.5);
}

TEST_CASE("numerical failure carries the step index") {
  // an unresolvable oscillation blows RK4 up quickly
  const auto params = MgtParameters::create(1, 1, 1, 1);
  const auto spectrum = OperatorSpectrum::from_eigenvalues({1e8});
  const auto grid = TimeGrid::create(10.0, 0.1);
  try {
    simulate(params, spectrum, MemoryKernel::zero(), bump(1), grid,
             IntegrationPath::prony_aux);
    FAIL("expected NumericalFailure");
  } catch (const NumericalFailure& e) {
    CHECK(e.step() > 0);
    CHECK(e.step() <= grid.n_steps);
  }
}

TEST_CASE("path/kernel compatibility") {
  const auto params = MgtParameters::create(1, 2, 1, 1, MemoryType::type1);
  const auto spectrum = OperatorSpectrum::from_eigenvalues({1.0});
  const auto grid = TimeGrid::create(1.0, 1e-2);
  std::vector<double> ts(101), gs(101);
  for (int i = 0; i <= 100; ++i) {
    ts[i] = 0.02 * i;
    gs[i] = 0.2 * std::exp(-2.0 * ts[i]);
  }
  const auto sampled = MemoryKernel::from_samples(ts, gs);
  CHECK_THROWS_AS(simulate(params, spectrum, sampled, bump(1), grid,
                           IntegrationPath::prony_aux),
                  ConfigError);
  // quadrature path accepts sampled kernels
  const auto traj = simulate(params, spectrum, sampled, bump(1), grid,
                             IntegrationPath::quadrature);
  CHECK(traj.n_points() == grid.n_points());
}

TEST_CASE("z-substitution residual vanishes on memoryless runs") {
  const auto spectrum = OperatorSpectrum::from_eigenvalues({1.0, 4.0});
  const auto grid = TimeGrid::create(5.0, 1e-3);
  InitialState init;
  init.u0 = {1.0, 0.3};
  init.u1 = {-0.2, 0.1};
  init.u2 = {0.4, 0.0};

  for (auto params : {MgtParameters::create(1, 2, 1, 1),
                      MgtParameters::create(1, 1, 1, 1)}) {
    const auto traj = simulate(params, spectrum, MemoryKernel::zero(), init, grid,
                               IntegrationPath::prony_aux);
    const auto res = z_substitution_residual(traj);
    CHECK(res.max_abs <= 1e-10 * res.scale);
  }

  const auto with_memory = simulate(
      MgtParameters::create(1, 2, 1, 1, MemoryType::type1), spectrum,
      MemoryKernel::prony({0.2}, {2.0}), init, grid, IntegrationPath::prony_aux);
  CHECK_THROWS_AS(z_substitution_residual(with_memory), std::invalid_argument);
}

TEST_CASE("critical w-equation residual shrinks at the path order") {
  const auto params = MgtParameters::create(1, 1, 1, 1, MemoryType::type3, 1.0);
  const auto spectrum = OperatorSpectrum::from_eigenvalues({1.0});
  const auto kernel = MemoryKernel::prony({0.2}, {2.0});
  const InitialState init = bump(1);

  auto residual_at = [&](double h, IntegrationPath path) {
    const auto grid = TimeGrid::create(2.0, h);
    const auto traj = simulate(params, spectrum, kernel, init, grid, path);
    return critical_w_equation_residual(traj).max_abs;
  };

  // quadrature: second order
  std::vector<double> res;
  for (double h : {1e-2, 5e-3, 2.5e-3})
    res.push_back(residual_at(h, IntegrationPath::quadrature));
  CHECK(res[0] / res[1] > 2.2);
  CHECK(res[1] / res[2] > 2.2);

  // prony path is far more accurate at the same step
  CHECK(residual_at(5e-3, IntegrationPath::prony_aux) < 0.05 * res[1]);

  // zero data: identically zero residual
  InitialState zero;
  zero.u0.assign(1, 0.0);
  zero.u1.assign(1, 0.0);
  zero.u2.assign(1, 0.0);
  const auto grid = TimeGrid::create(1.0, 1e-2);
  const auto tz = simulate(params, spectrum, kernel, zero, grid,
                           IntegrationPath::prony_aux);
  CHECK(critical_w_equation_residual(tz).max_abs == 0.0);

  // contract: non-critical or wrong-type runs are rejected
  const auto noncrit = MgtParameters::create(1, 2, 1, 1, MemoryType::type3, 1.5);
  const auto t2 = simulate(noncrit, spectrum, kernel, init, grid,
                           IntegrationPath::prony_aux);
  CHECK_THROWS_AS(critical_w_equation_residual(t2), std::invalid_argument);
}

TEST_CASE("synthetic trajectories fill the convolution by trapezoid") {
  const auto params = MgtParameters::create(1, 2, 1, 1, MemoryType::type1);
  const auto spectrum = OperatorSpectrum::from_eigenvalues({1.0});
  const auto kernel = MemoryKernel::prony({1.0}, {1.0});
  const auto grid = TimeGrid::create(1.0, 1e-2);
  const std::size_t n = grid.n_points();
  std::vector<ModalVector> u(n, ModalVector(1)), ut(n, ModalVector(1)),
      utt(n, ModalVector(1));
  for (std::size_t s = 0; s < n; ++s) {
    u[s][0] = grid.time(s);
    ut[s][0] = 1.0;
    utt[s][0] = 0.0;
  }
  const auto traj = Trajectory::from_states(grid, params, spectrum, kernel, u, ut, utt);
  // int_0^1 e^{-(1-s)} s ds = 1/e
  const double expect = 1.0 / std::exp(1.0);
  CHECK(traj.conv(n - 1, 0) == doctest::Approx(expect).epsilon(1e-4));
}
