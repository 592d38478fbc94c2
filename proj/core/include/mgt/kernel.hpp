#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "mgt/parameters.hpp"
#include "mgt/spectrum.hpp"

namespace mgt {

enum class KernelKind { zero, prony, sampled };

std::string to_string(KernelKind k);

/// Kernel values at one time: g, g', g'' and the cumulative strength
/// G(t) = integral of g over [0, t].
struct KernelPoint {
  double g = 0.0;
  double g_prime = 0.0;
  double g_double_prime = 0.0;
  double G = 0.0;
};

/// One decaying exponential weight * exp(-rate * t). Derivative
/// representations reuse the struct with signed weights.
struct PronyTerm {
  double weight = 0.0;
  double rate = 0.0;
};

/// Fading-memory kernel. Three representations:
///
///   zero     g == 0, the memoryless baseline;
///   prony    g(t) = sum_i w_i exp(-rate_i t) with w_i, rate_i > 0, so
///            derivatives and G are closed forms and g'' >= 0 holds by
///            structure;
///   sampled  uniform (t, g) samples starting at t = 0; g by linear
///            interpolation, g'/g'' by second-order differences, G by
///            cumulative trapezoid. Past the last sample the kernel is
///            continued with the exponential tail fitted at the endpoint
///            (used consistently for G(infinity)).
///
/// The domination constant c0 is the sharpest admissible constant in
/// g' <= -c0 g: min rate for prony kernels, the infimum of -g'/g over
/// samples with g > 1e-14 for sampled ones, +infinity for the zero kernel.
/// Immutable after construction; construction validates structure.
class MemoryKernel {
 public:
  MemoryKernel() = default;  // zero kernel

  static MemoryKernel zero();
  static MemoryKernel prony(std::vector<double> weights, std::vector<double> rates);
  static MemoryKernel from_samples(std::vector<double> t, std::vector<double> g);

  /// Two-column CSV "t,g" with a header row; uniform spacing enforced to
  /// relative 1e-9.
  static MemoryKernel load_csv(const std::string& path);

  KernelKind kind() const { return kind_; }
  bool is_zero() const { return kind_ == KernelKind::zero; }

  /// g, g', g'' and G at t >= 0; t < 0 is a domain error.
  KernelPoint eval(double t) const;

  double value(double t) const { return eval(t).g; }
  double derivative(double t) const { return eval(t).g_prime; }
  double second_derivative(double t) const { return eval(t).g_double_prime; }
  double cumulative(double t) const { return eval(t).G; }

  double g_infinity() const { return g_infinity_; }
  double c0() const { return c0_; }

  /// Exponential-sum representation of g, g' or g'' (prony kernels only):
  /// derivative order d maps term (w, r) to (w (-r)^d, r).
  std::vector<PronyTerm> prony_terms(int deriv_order = 0) const;

  /// Kernel with all g values multiplied by factor > 0.
  MemoryKernel scaled(double factor) const;

  /// Clauses: g_nonneg, gprime_nonpos, gsecond_nonneg, gprime_dominates_g.
  /// Witnesses: c0, G_infinity, g0. The domination clause also rejects a
  /// negative slope where g vanishes (no positive c0 exists for a kernel
  /// that is about to cross zero).
  AssumptionReport validate_assumption_A0() const;

  // sampled-kernel introspection
  std::size_t sample_count() const { return samples_t_.size(); }
  double sample_spacing() const { return sample_h_; }

 private:
  KernelKind kind_ = KernelKind::zero;
  // prony
  std::vector<double> weights_;
  std::vector<double> rates_;
  // sampled
  std::vector<double> samples_t_;
  std::vector<double> samples_g_;
  std::vector<double> samples_gp_;
  std::vector<double> samples_gpp_;
  std::vector<double> samples_G_;
  double sample_h_ = 0.0;
  double tail_rate_ = 0.0;  // decay rate of the extrapolated tail; inf => hard zero

  double g_infinity_ = 0.0;
  double c0_ = 0.0;

  void finalize_sampled();
};

/// Trapezoid value of the history functional
///
///   integral_0^t  k(t-s) sum_i w_i (f_i(t) - f_i(s))^2 ds
///
/// on the uniform grid of step h, where k is g, g' or g'' per kernel_deriv
/// and w_i are the spectrum eigenvalues (A^{1/2}-weighted norm) or ones
/// when spectrum is null (H norm). history[s][i] is mode i at step s and
/// must cover [0, t]; a gap is a precondition error.
double g_circ(const MemoryKernel& kernel,
              const std::vector<ModalVector>& history, double h,
              const OperatorSpectrum* spectrum, double t, int kernel_deriv = 0);

}  // namespace mgt
