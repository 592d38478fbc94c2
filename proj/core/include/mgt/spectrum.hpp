#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace mgt {

/// Coefficient vector in the eigenbasis of A, one entry per retained mode.
using ModalVector = std::vector<double>;

/// Finite eigen-realization of the positive self-adjoint operator A.
/// Eigenvalues are sorted ascending; lambda0 = 1/sqrt(mu_min) is the
/// embedding constant with |v| <= lambda0 |A^{1/2} v| for every
/// coefficient vector.
struct OperatorSpectrum {
  std::vector<double> eigenvalues;
  double lambda0 = 0.0;

  std::size_t size() const { return eigenvalues.size(); }

  /// Dirichlet Laplacian on an interval: mu_k = (k pi / L)^2, k = 1..n,
  /// lambda0 = L/pi.
  static OperatorSpectrum dirichlet_1d(double length, std::size_t n_modes);

  /// Explicit positive eigenvalue list; sorted ascending on construction.
  static OperatorSpectrum from_eigenvalues(std::vector<double> mu);
};

/// |v|^2 on H: sum v_i^2.
double h_norm2(std::span<const double> v);

/// |A^{1/2} v|^2: sum mu_i v_i^2.
double a_half_norm2(std::span<const double> v, const OperatorSpectrum& s);

/// (A v1, v2): sum mu_i v1_i v2_i.
double a_inner(std::span<const double> v1, std::span<const double> v2,
               const OperatorSpectrum& s);

}  // namespace mgt
