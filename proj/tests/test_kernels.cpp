#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>
#include <vector>

#include "mgt/kernel.hpp"
#include "mgt/spectrum.hpp"

using namespace mgt;

namespace {

std::vector<double> linspace(double a, double b, std::size_t n) {
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i)
    out[i] = a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1);
  return out;
}

}  // namespace

TEST_CASE("prony closed forms") {
  const auto k = MemoryKernel::prony({1.0}, {2.0});
  const auto p0 = k.eval(0.0);
  CHECK(p0.g == doctest::Approx(1.0));
  CHECK(p0.g_prime == doctest::Approx(-2.0));
  CHECK(p0.g_double_prime == doctest::Approx(4.0));
  CHECK(p0.G == doctest::Approx(0.0));
  CHECK(k.eval(50.0).G == doctest::Approx(0.5));
  CHECK(k.g_infinity() == doctest::Approx(0.5));
  CHECK(k.c0() == doctest::Approx(2.0));

  const auto two = MemoryKernel::prony({0.3, 0.2}, {1.0, 3.0});
  CHECK(two.g_infinity() == doctest::Approx(0.3 + 0.2 / 3.0));
  CHECK(two.c0() == doctest::Approx(1.0));

  // g' is the analytic derivative, same closed form
  for (double t : {0.0, 0.3, 1.7, 4.0}) {
    const double expect = -(0.3 * 1.0 * std::exp(-1.0 * t) + 0.2 * 3.0 * std::exp(-3.0 * t));
    CHECK(two.derivative(t) == doctest::Approx(expect).epsilon(1e-15));
  }
}

TEST_CASE("kernel domain and structure errors") {
  const auto k = MemoryKernel::prony({1.0}, {2.0});
  CHECK_THROWS_AS(k.eval(-0.1), std::domain_error);
  CHECK_THROWS_AS(MemoryKernel::prony({}, {}), std::invalid_argument);
  CHECK_THROWS_AS(MemoryKernel::prony({1.0}, {-2.0}), std::invalid_argument);
  CHECK_THROWS_AS(MemoryKernel::prony({0.0}, {2.0}), std::invalid_argument);
  // increasing samples rejected at construction
  CHECK_THROWS_AS(MemoryKernel::from_samples({0.0, 0.1, 0.2}, {1.0, 1.2, 1.4}),
                  std::invalid_argument);
  // nonuniform spacing rejected
  CHECK_THROWS_AS(MemoryKernel::from_samples({0.0, 0.1, 0.25}, {1.0, 0.9, 0.8}),
                  std::invalid_argument);
}

TEST_CASE("A0 verdicts per kind") {
  const auto zero = MemoryKernel::zero().validate_assumption_A0();
  CHECK(zero.satisfied);
  CHECK(std::isinf(zero.witnesses.at("c0")));

  const auto prony = MemoryKernel::prony({0.5}, {2.0}).validate_assumption_A0();
  CHECK(prony.satisfied);
  CHECK(prony.witnesses.at("c0") == doctest::Approx(2.0));
  CHECK(prony.witnesses.at("G_infinity") == doctest::Approx(0.25));
}

TEST_CASE("A0 rejects the truncated-ramp kernel") {
  // g(t) = max(0, 1-t) on [0,2]: hits zero with slope still negative, so no
  // positive domination constant exists
  const std::size_t n = 201;
  const auto ts = linspace(0.0, 2.0, n);
  std::vector<double> gs(n);
  for (std::size_t i = 0; i < n; ++i) gs[i] = std::max(0.0, 1.0 - ts[i]);
  const auto kernel = MemoryKernel::from_samples(ts, gs);
  const auto report = kernel.validate_assumption_A0();
  CHECK(!report.satisfied);
  bool found = false;
  for (const auto& v : report.violations)
    if (v == "gprime_dominates_g") found = true;
  CHECK(found);
}

TEST_CASE("sampled derivatives converge at second order") {
  auto max_gp_err = [](double h) {
    const std::size_t n = static_cast<std::size_t>(std::llround(2.0 / h)) + 1;
    const auto ts = linspace(0.0, 2.0, n);
    std::vector<double> gs(n);
    for (std::size_t i = 0; i < n; ++i) gs[i] = std::exp(-2.0 * ts[i]);
    const auto k = MemoryKernel::from_samples(ts, gs);
    double worst = 0.0;
    // probe on shared sample nodes so only the difference stencil matters
    for (double t : {0.24, 0.52, 1.0, 1.48})
      worst = std::max(worst, std::abs(k.derivative(t) + 2.0 * std::exp(-2.0 * t)));
    return worst;
  };
  const double e1 = max_gp_err(0.02);
  const double e2 = max_gp_err(0.01);
  CHECK(e1 / e2 > 3.0);
  CHECK(e1 / e2 < 5.0);
}

TEST_CASE("sampled cumulative strength and tail") {
  const double h = 0.001;
  const std::size_t n = static_cast<std::size_t>(std::llround(6.0 / h)) + 1;
  const auto ts = linspace(0.0, 6.0, n);
  std::vector<double> gs(n);
  for (std::size_t i = 0; i < n; ++i) gs[i] = 0.5 * std::exp(-2.0 * ts[i]);
  const auto k = MemoryKernel::from_samples(ts, gs);
  // exact G(inf) = 0.25; trapezoid plus exponential tail should land close
  CHECK(k.g_infinity() == doctest::Approx(0.25).epsilon(1e-4));
  // G non-decreasing, continuation beyond the sample range keeps it so
  double prev = -1.0;
  for (double t = 0.0; t < 9.0; t += 0.5) {
    const double G = k.cumulative(t);
    CHECK(G >= prev);
    prev = G;
  }
}

TEST_CASE("kernel CSV round trip and validation") {
  const std::string path = "kernel_csv_test.csv";
  {
    std::ofstream out(path);
    out << "t,g\n";
    for (int i = 0; i <= 300; ++i) {
      const double t = 0.01 * i;
      out << t << "," << 0.4 * std::exp(-1.5 * t) << "\n";
    }
  }
  const auto k = MemoryKernel::load_csv(path);
  CHECK(k.kind() == KernelKind::sampled);
  CHECK(k.sample_count() == 301);
  CHECK(k.value(1.0) == doctest::Approx(0.4 * std::exp(-1.5)).epsilon(1e-4));
  std::remove(path.c_str());

  CHECK_THROWS(MemoryKernel::load_csv("missing_file.csv"));
}

TEST_CASE("scaled kernel") {
  const auto k = MemoryKernel::prony({0.2}, {2.0});
  CHECK(k.scaled(3.0).g_infinity() == doctest::Approx(0.3));
  CHECK(k.scaled(3.0).c0() == doctest::Approx(2.0));
  CHECK_THROWS_AS(k.scaled(0.0), std::invalid_argument);
}

TEST_CASE("g_circ closed-form oracle") {
  // u(s) = s, g = e^{-t}, t = 1: int_0^1 e^{-r} r^2 dr = 2 - 5/e
  const double h = 1e-3;
  const std::size_t n = 1001;
  std::vector<ModalVector> history(n, ModalVector(1));
  for (std::size_t s = 0; s < n; ++s) history[s][0] = static_cast<double>(s) * h;
  const auto spectrum = OperatorSpectrum::from_eigenvalues({1.0});
  const auto kernel = MemoryKernel::prony({1.0}, {1.0});
  const double expect = 2.0 - 5.0 / std::exp(1.0);
  CHECK(g_circ(kernel, history, h, &spectrum, 1.0) ==
        doctest::Approx(expect).epsilon(1e-5));
}

TEST_CASE("g_circ trivial cases") {
  const double h = 0.01;
  const std::size_t n = 101;
  std::vector<ModalVector> history(n, ModalVector{2.5});  // constant history
  const auto spectrum = OperatorSpectrum::from_eigenvalues({3.0});
  const auto kernel = MemoryKernel::prony({1.0}, {1.0});
  CHECK(g_circ(kernel, history, h, &spectrum, 1.0) == doctest::Approx(0.0));
  CHECK(g_circ(MemoryKernel::zero(), history, h, &spectrum, 1.0) == 0.0);
  CHECK(g_circ(kernel, history, h, &spectrum, 0.0) == 0.0);

  CHECK_THROWS_AS(g_circ(kernel, history, h, &spectrum, -1.0), std::domain_error);
  CHECK_THROWS_AS(g_circ(kernel, history, h, &spectrum, 2.0), std::invalid_argument);
}

TEST_CASE("g_circ shift invariance") {
  std::mt19937_64 rng(11);
  auto uni = [&] { return static_cast<double>(rng() >> 11) * 0x1.0p-53 - 0.5; };
  const double h = 0.01;
  const std::size_t n = 201;
  std::vector<ModalVector> a(n, ModalVector(3)), b(n, ModalVector(3));
  const double shift[3] = {1.7, -0.4, 12.0};
  for (std::size_t s = 0; s < n; ++s)
    for (std::size_t i = 0; i < 3; ++i) {
      a[s][i] = uni();
      b[s][i] = a[s][i] + shift[i];
    }
  const auto spectrum = OperatorSpectrum::from_eigenvalues({1.0, 4.0, 9.0});
  const auto kernel = MemoryKernel::prony({0.5, 0.2}, {1.0, 2.5});
  const double va = g_circ(kernel, a, h, &spectrum, 2.0);
  const double vb = g_circ(kernel, b, h, &spectrum, 2.0);
  CHECK(va == doctest::Approx(vb).epsilon(1e-12));
  CHECK(va >= 0.0);
}

TEST_CASE("g_circ trapezoid refinement is second order") {
  auto value_at = [](double h) {
    const std::size_t n = static_cast<std::size_t>(std::llround(2.0 / h)) + 1;
    std::vector<ModalVector> hist(n, ModalVector(1));
    for (std::size_t s = 0; s < n; ++s) hist[s][0] = std::sin(static_cast<double>(s) * h);
    const auto spectrum = OperatorSpectrum::from_eigenvalues({1.0});
    const auto kernel = MemoryKernel::prony({1.0}, {1.0});
    return g_circ(kernel, hist, h, &spectrum, 2.0);
  };
  const double v1 = value_at(0.02), v2 = value_at(0.01), v3 = value_at(0.005);
  const double ratio = (v1 - v2) / (v2 - v3);
  CHECK(ratio > 2.5);
  CHECK(ratio < 6.0);
}

TEST_CASE("g_circ H-norm variant drops the weights") {
  const double h = 0.01;
  const std::size_t n = 101;
  std::vector<ModalVector> hist(n, ModalVector(2));
  for (std::size_t s = 0; s < n; ++s) {
    hist[s][0] = 0.1 * static_cast<double>(s) * h;
    hist[s][1] = -0.2 * static_cast<double>(s) * h;
  }
  const auto spectrum = OperatorSpectrum::from_eigenvalues({2.0, 5.0});
  const auto kernel = MemoryKernel::prony({1.0}, {1.0});
  const double weighted = g_circ(kernel, hist, h, &spectrum, 1.0);
  const double plain = g_circ(kernel, hist, h, nullptr, 1.0);
  CHECK(weighted > plain);  // all eigenvalues exceed one here
}
