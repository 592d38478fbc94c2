#include "mgt/dynamics.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <thread>

#include "mgt/errors.hpp"

namespace mgt {

std::string to_string(IntegrationPath p) {
  return p == IntegrationPath::prony_aux ? "prony_aux" : "quadrature";
}

TimeGrid TimeGrid::create(double t_end, double h) {
  if (!(t_end > 0.0) || !std::isfinite(t_end))
    throw std::invalid_argument("t_end must be > 0");
  if (!(h > 0.0) || !std::isfinite(h)) throw std::invalid_argument("h must be > 0");
  const auto n = static_cast<std::size_t>(std::llround(t_end / h));
  if (n == 0 || std::abs(static_cast<double>(n) * h - t_end) > 1e-12 * t_end)
    throw std::invalid_argument("t_end must be an integer multiple of h (relative 1e-12)");
  TimeGrid g;
  g.t_end = t_end;
  g.h = h;
  g.n_steps = n;
  return g;
}

double Trajectory::aux(std::size_t step, std::size_t mode, std::size_t term) const {
  return aux_[(mode * n_aux_ + term) * grid_.n_points() + step];
}

double Trajectory::w(std::size_t step, std::size_t mode) const {
  switch (params_.memory_type) {
    case MemoryType::none: return 0.0;
    case MemoryType::type1: return u(step, mode);
    case MemoryType::type2: return ut(step, mode);
    case MemoryType::type3:
      return params_.lambda * u(step, mode) + ut(step, mode);
  }
  return 0.0;
}

double Trajectory::wt(std::size_t step, std::size_t mode) const {
  switch (params_.memory_type) {
    case MemoryType::none: return 0.0;
    case MemoryType::type1: return ut(step, mode);
    case MemoryType::type2: return utt(step, mode);
    case MemoryType::type3:
      return params_.lambda * ut(step, mode) + utt(step, mode);
  }
  return 0.0;
}

namespace {

std::vector<ModalVector> collect(const Trajectory& traj,
                                 double (Trajectory::*field)(std::size_t, std::size_t) const) {
  std::vector<ModalVector> out(traj.n_points(), ModalVector(traj.n_modes()));
  for (std::size_t s = 0; s < traj.n_points(); ++s)
    for (std::size_t i = 0; i < traj.n_modes(); ++i)
      out[s][i] = (traj.*field)(s, i);
  return out;
}

}  // namespace

std::vector<ModalVector> Trajectory::history_u() const { return collect(*this, &Trajectory::u); }
std::vector<ModalVector> Trajectory::history_ut() const { return collect(*this, &Trajectory::ut); }
std::vector<ModalVector> Trajectory::history_w() const { return collect(*this, &Trajectory::w); }

Trajectory Trajectory::from_states(const TimeGrid& grid, const MgtParameters& params,
                                   const OperatorSpectrum& spectrum,
                                   const MemoryKernel& kernel,
                                   const std::vector<ModalVector>& u,
                                   const std::vector<ModalVector>& ut,
                                   const std::vector<ModalVector>& utt) {
  const std::size_t n_pts = grid.n_points();
  const std::size_t n_modes = spectrum.size();
  if (u.size() != n_pts || ut.size() != n_pts || utt.size() != n_pts)
    throw std::invalid_argument("state history length does not match the grid");

  Trajectory traj;
  traj.grid_ = grid;
  traj.params_ = params;
  traj.spectrum_ = spectrum;
  traj.kernel_ = kernel;
  traj.path_ = IntegrationPath::quadrature;
  traj.n_modes_ = n_modes;
  traj.u_.assign(n_modes * n_pts, 0.0);
  traj.ut_.assign(n_modes * n_pts, 0.0);
  traj.utt_.assign(n_modes * n_pts, 0.0);
  traj.conv_.assign(n_modes * n_pts, 0.0);
  for (std::size_t s = 0; s < n_pts; ++s) {
    if (u[s].size() != n_modes || ut[s].size() != n_modes || utt[s].size() != n_modes)
      throw std::invalid_argument("state history width does not match the spectrum");
    for (std::size_t i = 0; i < n_modes; ++i) {
      traj.u_[traj.idx(s, i)] = u[s][i];
      traj.ut_[traj.idx(s, i)] = ut[s][i];
      traj.utt_[traj.idx(s, i)] = utt[s][i];
    }
  }
  // convolution of the memory field by direct trapezoid over the history
  if (!kernel.is_zero() && params.memory_type != MemoryType::none) {
    const double h = grid.h;
    std::vector<double> w_hist(n_pts);
    for (std::size_t i = 0; i < n_modes; ++i) {
      for (std::size_t s = 0; s < n_pts; ++s) w_hist[s] = traj.w(s, i);
      for (std::size_t n = 1; n < n_pts; ++n) {
        double sum = 0.0;
        for (std::size_t s = 0; s <= n; ++s) {
          const double weight = (s == 0 || s == n) ? 0.5 : 1.0;
          sum += weight * kernel.value(static_cast<double>(n - s) * h) * w_hist[s];
        }
        traj.conv_[traj.idx(n, i)] = sum * h;
      }
    }
  }
  return traj;
}

namespace {

struct ModeEquation {
  double tau, alpha, b, c2, mu, lambda;
  MemoryType type;

  double w_of(double u, double v) const {
    switch (type) {
      case MemoryType::none: return 0.0;
      case MemoryType::type1: return u;
      case MemoryType::type2: return v;
      case MemoryType::type3: return lambda * u + v;
    }
    return 0.0;
  }

  double accel_rate(double u, double v, double a, double conv) const {
    return (-alpha * a - c2 * mu * u - b * mu * v + mu * conv) / tau;
  }
};

unsigned resolve_threads(unsigned requested, std::size_t n_modes) {
  unsigned n = requested;
  if (n == 0) {
    if (const char* env = std::getenv("MGT_THREADS")) {
      const long v = std::strtol(env, nullptr, 10);
      if (v > 0) n = static_cast<unsigned>(v);
    }
  }
  if (n == 0) n = std::max(1u, std::thread::hardware_concurrency());
  return static_cast<unsigned>(std::min<std::size_t>(n, n_modes));
}

}  // namespace

// needs access to Trajectory privates; declared friend
Trajectory simulate_impl(const MgtParameters& params, const OperatorSpectrum& spectrum,
                         const MemoryKernel& kernel, const InitialState& initial,
                         const TimeGrid& grid, IntegrationPath path, unsigned threads) {
  const std::size_t n_modes = spectrum.size();
  const std::size_t n_pts = grid.n_points();
  const double h = grid.h;

  Trajectory traj;
  traj.grid_ = grid;
  traj.params_ = params;
  traj.spectrum_ = spectrum;
  traj.kernel_ = kernel;
  traj.path_ = path;
  traj.n_modes_ = n_modes;

  const bool has_memory = !kernel.is_zero() && params.memory_type != MemoryType::none;
  std::vector<PronyTerm> terms;
  if (has_memory && kernel.kind() == KernelKind::prony) terms = kernel.prony_terms(0);
  const std::size_t n_aux =
      (path == IntegrationPath::prony_aux && has_memory) ? terms.size() : 0;
  traj.n_aux_ = n_aux;

  traj.u_.assign(n_modes * n_pts, 0.0);
  traj.ut_.assign(n_modes * n_pts, 0.0);
  traj.utt_.assign(n_modes * n_pts, 0.0);
  traj.conv_.assign(n_modes * n_pts, 0.0);
  traj.aux_.assign(n_modes * n_aux * n_pts, 0.0);

  // kernel values on the grid offsets, for the direct quadrature fallback
  std::vector<double> g_table;
  const bool direct_conv = has_memory && path == IntegrationPath::quadrature &&
                           kernel.kind() == KernelKind::sampled;
  if (direct_conv) {
    g_table.resize(n_pts);
    for (std::size_t m = 0; m < n_pts; ++m)
      g_table[m] = kernel.value(static_cast<double>(m) * h);
  }
  const double g_at_0 = has_memory ? kernel.value(0.0) : 0.0;

  std::atomic<std::size_t> first_failure{std::numeric_limits<std::size_t>::max()};

  auto integrate_mode = [&](std::size_t mode) {
    const ModeEquation eq{params.tau,    params.alpha, params.b,
                          params.c2,     spectrum.eigenvalues[mode],
                          params.lambda, params.memory_type};
    double* const us = traj.u_.data() + mode * n_pts;
    double* const vs = traj.ut_.data() + mode * n_pts;
    double* const as = traj.utt_.data() + mode * n_pts;
    double* const cs = traj.conv_.data() + mode * n_pts;

    us[0] = initial.u0[mode];
    vs[0] = initial.u1[mode];
    as[0] = initial.u2[mode];

    auto check_finite = [&](std::size_t step, double u, double v, double a) {
      if (!std::isfinite(u) || !std::isfinite(v) || !std::isfinite(a)) {
        std::size_t expected = first_failure.load();
        while (step < expected &&
               !first_failure.compare_exchange_weak(expected, step)) {
        }
        return false;
      }
      return true;
    };
    if (!check_finite(0, us[0], vs[0], as[0])) return;

    if (path == IntegrationPath::prony_aux) {
      // enlarged linear system (u, v, a, z_1..z_m), classical RK4
      const std::size_t m = n_aux;
      std::vector<double> y(3 + m, 0.0), k1(3 + m), k2(3 + m), k3(3 + m),
          k4(3 + m), tmp(3 + m);
      y[0] = us[0];
      y[1] = vs[0];
      y[2] = as[0];

      auto rhs = [&](const std::vector<double>& s, std::vector<double>& d) {
        double conv = 0.0;
        for (std::size_t j = 0; j < m; ++j) conv += s[3 + j];
        d[0] = s[1];
        d[1] = s[2];
        d[2] = eq.accel_rate(s[0], s[1], s[2], conv);
        const double w = eq.w_of(s[0], s[1]);
        for (std::size_t j = 0; j < m; ++j)
          d[3 + j] = -terms[j].rate * s[3 + j] + terms[j].weight * w;
      };

      for (std::size_t step = 0; step < grid.n_steps; ++step) {
        rhs(y, k1);
        for (std::size_t q = 0; q < y.size(); ++q) tmp[q] = y[q] + 0.5 * h * k1[q];
        rhs(tmp, k2);
        for (std::size_t q = 0; q < y.size(); ++q) tmp[q] = y[q] + 0.5 * h * k2[q];
        rhs(tmp, k3);
        for (std::size_t q = 0; q < y.size(); ++q) tmp[q] = y[q] + h * k3[q];
        rhs(tmp, k4);
        for (std::size_t q = 0; q < y.size(); ++q)
          y[q] += (h / 6.0) * (k1[q] + 2.0 * k2[q] + 2.0 * k3[q] + k4[q]);

        const std::size_t n1 = step + 1;
        us[n1] = y[0];
        vs[n1] = y[1];
        as[n1] = y[2];
        double conv = 0.0;
        for (std::size_t j = 0; j < m; ++j) {
          conv += y[3 + j];
          traj.aux_[(mode * m + j) * n_pts + n1] = y[3 + j];
        }
        cs[n1] = conv;
        if (!check_finite(n1, y[0], y[1], y[2])) return;
      }
      return;
    }

    // quadrature path: one-correction predictor-corrector (Heun) with the
    // convolution as a trapezoid sum over the stored history
    std::vector<double> w_hist(n_pts, 0.0);
    w_hist[0] = eq.w_of(us[0], vs[0]);

    // prony kernels advance the trapezoid sum with the exact per-term
    // recurrence T(n+1) = e^{-r h} (T(n) + (h/2) w g_j w_n) + (h/2) g_j w_{n+1};
    // other kernels fall back to the direct O(n) sum per step
    std::vector<double> T, decay;
    const bool recur = has_memory && kernel.kind() == KernelKind::prony;
    if (recur) {
      T.assign(terms.size(), 0.0);
      decay.resize(terms.size());
      for (std::size_t j = 0; j < terms.size(); ++j)
        decay[j] = std::exp(-terms[j].rate * h);
    }

    auto direct_sum = [&](std::size_t n, double w_end) {
      // trapezoid of g((n)h - s) w(s) over s = 0..n with w(n) = w_end
      double sum = 0.5 * g_table[n] * w_hist[0];
      for (std::size_t s = 1; s < n; ++s) sum += g_table[n - s] * w_hist[s];
      sum += 0.5 * g_table[0] * w_end;
      return sum * h;
    };

    double conv_n = 0.0;
    for (std::size_t step = 0; step < grid.n_steps; ++step) {
      const double u0 = us[step], v0 = vs[step], a0 = as[step];

      // predictor: Euler with the convolution frozen from known history
      const double du0 = v0;
      const double dv0 = a0;
      const double da0 = eq.accel_rate(u0, v0, a0, conv_n);
      const double up = u0 + h * du0;
      const double vp = v0 + h * dv0;
      const double ap = a0 + h * da0;
      const double wp = eq.w_of(up, vp);

      // convolution at t_{n+1} including the predicted endpoint
      double conv_pred = 0.0;
      std::vector<double> T_pred;
      if (has_memory) {
        if (recur) {
          T_pred = T;
          for (std::size_t j = 0; j < terms.size(); ++j) {
            T_pred[j] = decay[j] * (T[j] + 0.5 * h * terms[j].weight * w_hist[step]) +
                        0.5 * h * terms[j].weight * wp;
            conv_pred += T_pred[j];
          }
        } else if (direct_conv) {
          conv_pred = direct_sum(step + 1, wp);
        }
      }

      // single correction
      const double dup = vp;
      const double dvp = ap;
      const double dap = eq.accel_rate(up, vp, ap, conv_pred);
      const double u1 = u0 + 0.5 * h * (du0 + dup);
      const double v1 = v0 + 0.5 * h * (dv0 + dvp);
      const double a1 = a0 + 0.5 * h * (da0 + dap);
      const double w1 = eq.w_of(u1, v1);

      // the endpoint carries weight h/2 g(0); swap predicted for corrected
      double conv_next = conv_pred + 0.5 * h * g_at_0 * (w1 - wp);
      if (recur) {
        for (std::size_t j = 0; j < terms.size(); ++j)
          T[j] = T_pred[j] + 0.5 * h * terms[j].weight * (w1 - wp);
      }
      if (!has_memory) conv_next = 0.0;

      const std::size_t n1 = step + 1;
      us[n1] = u1;
      vs[n1] = v1;
      as[n1] = a1;
      cs[n1] = conv_next;
      w_hist[n1] = w1;
      conv_n = conv_next;
      if (!check_finite(n1, u1, v1, a1)) return;
    }
  };

  const unsigned n_threads = threads;
  if (n_threads <= 1 || n_modes <= 1) {
    for (std::size_t mode = 0; mode < n_modes; ++mode) integrate_mode(mode);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(n_threads);
    std::atomic<std::size_t> next{0};
    for (unsigned t = 0; t < n_threads; ++t)
      pool.emplace_back([&] {
        for (std::size_t mode = next.fetch_add(1); mode < n_modes;
             mode = next.fetch_add(1))
          integrate_mode(mode);
      });
    for (auto& th : pool) th.join();
  }

  const std::size_t failed = first_failure.load();
  if (failed != std::numeric_limits<std::size_t>::max())
    throw NumericalFailure(failed, "state became non-finite at step " +
                                        std::to_string(failed));
  return traj;
}

Trajectory simulate(const MgtParameters& params, const OperatorSpectrum& spectrum,
                    const MemoryKernel& kernel, const InitialState& initial,
                    const TimeGrid& grid, IntegrationPath path,
                    const SimulateOptions& options) {
  const std::size_t n_modes = spectrum.size();
  if (initial.u0.size() != n_modes || initial.u1.size() != n_modes ||
      initial.u2.size() != n_modes)
    throw std::invalid_argument("initial data length does not match the spectrum");
  for (std::size_t i = 0; i < n_modes; ++i)
    if (!std::isfinite(initial.u0[i]) || !std::isfinite(initial.u1[i]) ||
        !std::isfinite(initial.u2[i]))
      throw std::invalid_argument("initial data must be finite");
  if (path == IntegrationPath::prony_aux && kernel.kind() == KernelKind::sampled)
    throw ConfigError("path prony_aux requires a prony or zero kernel");

  return simulate_impl(params, spectrum, kernel, initial, grid, path,
                       resolve_threads(options.threads, n_modes));
}

ResidualSeries z_substitution_residual(const Trajectory& traj) {
  if (!traj.kernel().is_zero())
    throw std::invalid_argument("z-substitution residual requires a memoryless trajectory");
  const MgtParameters& p = traj.params();
  const double g = gamma(p);
  const double c2b = p.c2 / p.b;

  ResidualSeries out;
  out.series.assign(traj.n_points(), 0.0);
  for (std::size_t s = 0; s < traj.n_points(); ++s) {
    double worst = 0.0;
    for (std::size_t i = 0; i < traj.n_modes(); ++i) {
      const double mu = traj.spectrum().eigenvalues[i];
      const double u = traj.u(s, i), v = traj.ut(s, i), a = traj.utt(s, i);
      const double uttt = -(p.alpha * a + p.c2 * mu * u + p.b * mu * v) / p.tau;
      const double z = v + c2b * u;
      const double zt = a + c2b * v;
      const double ztt = uttt + c2b * a;
      const double t1 = p.tau * ztt;
      const double t2 = p.b * mu * z;
      const double t3 = g * zt;
      const double t4 = g * c2b * v;
      const double r = t1 + t2 + t3 - t4;
      worst = std::max(worst, std::abs(r));
      out.scale = std::max({out.scale, std::abs(t1), std::abs(t2), std::abs(t3),
                            std::abs(t4)});
    }
    out.series[s] = worst;
    out.max_abs = std::max(out.max_abs, worst);
  }
  return out;
}

ResidualSeries critical_w_equation_residual(const Trajectory& traj) {
  const MgtParameters& p = traj.params();
  if (p.memory_type != MemoryType::type3)
    throw std::invalid_argument("w-equation residual requires memory type 3");
  if (regime(p) != Regime::critical)
    throw std::invalid_argument("w-equation residual requires the critical regime");
  const double target = p.alpha / p.tau;
  if (std::abs(p.lambda - target) > kCriticalRelTol * std::max(1.0, target))
    throw std::invalid_argument("w-equation residual requires lambda = alpha/tau = c2/b");

  if (traj.n_points() < 5)
    throw std::invalid_argument("w-equation residual needs at least 5 grid points");

  // u_ttt comes from differentiating the stored u_tt history (fourth-order
  // central differences on interior points), not from the equation itself,
  // so the residual reflects the integration error rather than cancelling
  // algebraically.
  const double h = traj.grid().h;
  ResidualSeries out;
  out.series.assign(traj.n_points(), 0.0);
  for (std::size_t s = 2; s + 2 < traj.n_points(); ++s) {
    double worst = 0.0;
    for (std::size_t i = 0; i < traj.n_modes(); ++i) {
      const double mu = traj.spectrum().eigenvalues[i];
      const double u = traj.u(s, i), v = traj.ut(s, i), a = traj.utt(s, i);
      const double conv = traj.conv(s, i);
      const double uttt =
          (traj.utt(s - 2, i) - 8.0 * traj.utt(s - 1, i) + 8.0 * traj.utt(s + 1, i) -
           traj.utt(s + 2, i)) /
          (12.0 * h);
      const double w = p.lambda * u + v;
      const double wtt = p.lambda * a + uttt;
      const double t1 = p.tau * wtt;
      const double t2 = p.b * mu * w;
      const double t3 = mu * conv;
      const double r = t1 + t2 - t3;
      worst = std::max(worst, std::abs(r));
      out.scale = std::max({out.scale, std::abs(t1), std::abs(t2), std::abs(t3)});
    }
    out.series[s] = worst;
    out.max_abs = std::max(out.max_abs, worst);
  }
  return out;
}

}  // namespace mgt
