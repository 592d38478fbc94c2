#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "mgt/kernel.hpp"
#include "mgt/parameters.hpp"
#include "mgt/spectrum.hpp"

namespace mgt {

/// Uniform integration grid; n_steps * h must reproduce t_end to relative
/// 1e-12.
struct TimeGrid {
  double t_end = 0.0;
  double h = 0.0;
  std::size_t n_steps = 0;

  static TimeGrid create(double t_end, double h);

  double time(std::size_t step) const { return static_cast<double>(step) * h; }
  std::size_t n_points() const { return n_steps + 1; }
};

/// prony_aux realizes the convolution with auxiliary exponential states
/// integrated by classical RK4 (prony or zero kernels only); quadrature
/// advances with a one-correction predictor-corrector and trapezoid
/// convolution sums (any kernel).
enum class IntegrationPath { prony_aux, quadrature };

std::string to_string(IntegrationPath p);

struct InitialState {
  ModalVector u0, u1, u2;
};

/// A state stopped being finite; carries the step where it happened.
class NumericalFailure : public std::runtime_error {
 public:
  NumericalFailure(std::size_t step, const std::string& what)
      : std::runtime_error(what), step_(step) {}
  std::size_t step() const { return step_; }

 private:
  std::size_t step_ = 0;
};

/// Full per-step history of (u, u_t, u_tt) per mode, the convolution value
/// used at each step, and the auxiliary memory states on the prony path.
/// Immutable once returned by simulate().
class Trajectory {
 public:
  const TimeGrid& grid() const { return grid_; }
  const MgtParameters& params() const { return params_; }
  const OperatorSpectrum& spectrum() const { return spectrum_; }
  const MemoryKernel& kernel() const { return kernel_; }
  IntegrationPath path() const { return path_; }

  std::size_t n_modes() const { return n_modes_; }
  std::size_t n_points() const { return grid_.n_points(); }
  std::size_t n_aux_terms() const { return n_aux_; }

  double u(std::size_t step, std::size_t mode) const { return u_[idx(step, mode)]; }
  double ut(std::size_t step, std::size_t mode) const { return ut_[idx(step, mode)]; }
  double utt(std::size_t step, std::size_t mode) const { return utt_[idx(step, mode)]; }

  /// integral_0^{t_step} g(t_step - s) w_mode(s) ds as the integrator saw it.
  double conv(std::size_t step, std::size_t mode) const { return conv_[idx(step, mode)]; }

  /// Auxiliary state for one prony term (prony path only).
  double aux(std::size_t step, std::size_t mode, std::size_t term) const;

  /// Memory field w and its time derivative at a grid point.
  double w(std::size_t step, std::size_t mode) const;
  double wt(std::size_t step, std::size_t mode) const;

  /// History of one field as step-indexed modal vectors (test/oracle use).
  std::vector<ModalVector> history_u() const;
  std::vector<ModalVector> history_ut() const;
  std::vector<ModalVector> history_w() const;

  /// Builds a trajectory from externally prescribed states (synthetic
  /// histories for oracles); convolution values are filled by direct
  /// trapezoid sums over the given history.
  static Trajectory from_states(const TimeGrid& grid, const MgtParameters& params,
                                const OperatorSpectrum& spectrum,
                                const MemoryKernel& kernel,
                                const std::vector<ModalVector>& u,
                                const std::vector<ModalVector>& ut,
                                const std::vector<ModalVector>& utt);

 private:
  friend Trajectory simulate_impl(const MgtParameters&, const OperatorSpectrum&,
                                  const MemoryKernel&, const InitialState&,
                                  const TimeGrid&, IntegrationPath, unsigned);

  std::size_t idx(std::size_t step, std::size_t mode) const {
    return mode * grid_.n_points() + step;
  }

  TimeGrid grid_;
  MgtParameters params_;
  OperatorSpectrum spectrum_;
  MemoryKernel kernel_;
  IntegrationPath path_ = IntegrationPath::prony_aux;
  std::size_t n_modes_ = 0;
  std::size_t n_aux_ = 0;
  // mode-major [mode * n_points + step]
  std::vector<double> u_, ut_, utt_, conv_;
  // aux_[ (mode * n_aux + term) * n_points + step ]
  std::vector<double> aux_;
};

struct SimulateOptions {
  /// 0: use MGT_THREADS from the environment, else hardware concurrency.
  unsigned threads = 0;
};

/// Integrates the modal equations
///
///   tau u''' + alpha u'' + c2 mu u + b mu u' - mu conv = 0,
///   conv(t) = integral_0^t g(t-s) w(s) ds,
///
/// one decoupled system per eigenvalue mu, from (u0, u1, u2) over the grid.
/// Modes may run in parallel; results are merged in ascending mode order so
/// output is bitwise deterministic. Throws ConfigError on an incompatible
/// kernel/path pair and NumericalFailure when a state leaves the finite
/// range.
Trajectory simulate(const MgtParameters& params, const OperatorSpectrum& spectrum,
                    const MemoryKernel& kernel, const InitialState& initial,
                    const TimeGrid& grid, IntegrationPath path,
                    const SimulateOptions& options = {});

struct ResidualSeries {
  std::vector<double> series;  ///< per grid point, max abs over modes
  double max_abs = 0.0;
  double scale = 0.0;  ///< max abs of the identity's individual terms
};

/// Residual of tau z_tt + b A z + gamma z_t - (gamma c2 / b) u_t with
/// z = u_t + (c2/b) u, using u_ttt eliminated through the equation itself.
/// Algebraically zero, so the result is pure roundoff. Memoryless
/// trajectories only.
ResidualSeries z_substitution_residual(const Trajectory& traj);

/// Residual of tau w_tt + b A w - g * A w with w = lambda u + u_t on
/// critical type-3 trajectories, with the convolution taken from the
/// trajectory's own memory path. Decays at the integration path's order.
ResidualSeries critical_w_equation_residual(const Trajectory& traj);

}  // namespace mgt
