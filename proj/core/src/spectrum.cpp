#include "mgt/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace mgt {

OperatorSpectrum OperatorSpectrum::dirichlet_1d(double length, std::size_t n_modes) {
  if (!(length > 0.0)) throw std::invalid_argument("length must be > 0");
  if (n_modes == 0) throw std::invalid_argument("n_modes must be >= 1");
  OperatorSpectrum s;
  s.eigenvalues.reserve(n_modes);
  for (std::size_t k = 1; k <= n_modes; ++k) {
    const double w = static_cast<double>(k) * std::numbers::pi / length;
    s.eigenvalues.push_back(w * w);
  }
  s.lambda0 = length / std::numbers::pi;
  return s;
}

OperatorSpectrum OperatorSpectrum::from_eigenvalues(std::vector<double> mu) {
  if (mu.empty()) throw std::invalid_argument("eigenvalue list must not be empty");
  for (double m : mu)
    if (!(m > 0.0) || !std::isfinite(m))
      throw std::invalid_argument("eigenvalues must be positive and finite");
  std::sort(mu.begin(), mu.end());
  OperatorSpectrum s;
  s.lambda0 = 1.0 / std::sqrt(mu.front());
  s.eigenvalues = std::move(mu);
  return s;
}

double h_norm2(std::span<const double> v) {
  double sum = 0.0;
  for (double x : v) sum += x * x;
  return sum;
}

double a_half_norm2(std::span<const double> v, const OperatorSpectrum& s) {
  if (v.size() != s.size())
    throw std::invalid_argument("vector length does not match spectrum size");
  double sum = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) sum += s.eigenvalues[i] * v[i] * v[i];
  return sum;
}

double a_inner(std::span<const double> v1, std::span<const double> v2,
               const OperatorSpectrum& s) {
  if (v1.size() != s.size() || v2.size() != s.size())
    throw std::invalid_argument("vector length does not match spectrum size");
  double sum = 0.0;
  for (std::size_t i = 0; i < v1.size(); ++i) sum += s.eigenvalues[i] * v1[i] * v2[i];
  return sum;
}

}  // namespace mgt
