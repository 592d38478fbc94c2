#pragma once

#include <array>
#include <complex>
#include <span>
#include <string_view>
#include <vector>

#include "mgt/energy.hpp"

namespace mgt {

/// Least-squares exponential fit over the tail window of a series, in the
/// normalized bound form  y(t) ~ C * y(0) * exp(-omega t).
struct DecayFit {
  double omega = 0.0;
  double C = 0.0;
  double r_squared = 0.0;
  double window_start = 0.0;
  double window_end = 0.0;
};

/// Fits a line through (t, log y) on the trailing window_fraction of the
/// grid. A nonpositive value inside the window is a domain error (the
/// series does not decay, or it underflowed).
DecayFit fit_decay_rate(std::span<const double> series, const TimeGrid& grid,
                        double window_fraction);

enum class IdentityId { E0R0, E1R1, E2R2, E3R3, E3crR3cr, E11m_id, E12m_id };
enum class SignConvention { printed, sign_corrected };

std::string_view to_string(IdentityId id);
std::string_view to_string(SignConvention c);

struct IdentityAuditResult {
  IdentityId identity = IdentityId::E0R0;
  SignConvention convention = SignConvention::printed;
  std::vector<double> residual_series;  ///< normalized, interior points
  double max_abs_residual = 0.0;        ///< normalized by `scale`
  double raw_max_residual = 0.0;
  double scale = 0.0;
  double refinement_order = 0.0;  ///< 0 until estimated across step sizes
};

/// Residual of d/dt E + R (minus the memory product for the piece
/// identities), with dE/dt by fourth-order central differences on interior
/// points. Residuals are normalized by the larger of the two sides' sups;
/// when the damper side is numerically zero (conservative runs) the energy
/// scale over the horizon stands in, so the reported number still vanishes
/// under refinement. One result per sign convention; needs >= 5 grid
/// points.
std::array<IdentityAuditResult, 2> identity_audit(const Trajectory& traj,
                                                  const EnergyLedger& ledger,
                                                  IdentityId id);

const IdentityAuditResult& winning(const std::array<IdentityAuditResult, 2>& results);

/// Least-squares slope of log(residual) against log(h); needs >= 2 points,
/// >= 3 for the audits' contract.
double estimate_refinement_order(std::span<const double> hs,
                                 std::span<const double> residuals);

struct RefinedAudit {
  std::array<IdentityAuditResult, 2> finest;  ///< refinement_order filled in
  SignConvention winner = SignConvention::printed;
  std::vector<double> hs;
  std::vector<double> residuals;  ///< winning convention, per level
};

/// Reruns simulate + ledger at h, h/2, ..., h/2^(levels-1) and estimates
/// the winning convention's refinement order by log-log regression.
RefinedAudit identity_audit_refined(const MgtParameters& params,
                                    const OperatorSpectrum& spectrum,
                                    const MemoryKernel& kernel,
                                    const InitialState& initial,
                                    const TimeGrid& coarsest, IntegrationPath path,
                                    IdentityId id, int levels);

struct EquivalenceConstants {
  double c1 = 0.0;  ///< min a/b over the grid
  double c2 = 0.0;  ///< max a/b over the grid
};

/// Empirical equivalence constants between two positive series.
EquivalenceConstants equivalence_constants(std::span<const double> a,
                                           std::span<const double> b);

struct GronwallCheck {
  double c_est = 0.0;        ///< sup over the first half of tail integral / value
  double c_est_inner = 0.0;  ///< same computed as if the run stopped at t_end/2
  bool satisfied = false;    ///< finite and stable under doubling the horizon
};

/// Integral-form decay test: a finite, horizon-stable supremum of
/// (integral_t^{t_end} F) / F(t) certifies exponential decay; a supremum
/// that keeps growing with the horizon refutes it. A zero value with a
/// nonzero tail integral is reported as unsatisfied.
GronwallCheck gronwall_integral_check(std::span<const double> series,
                                      const TimeGrid& grid);

struct StabilityVerdict {
  double mu = 0.0;
  std::array<std::complex<double>, 3> roots{};
  double max_real_part = 0.0;
  bool hurwitz = false;            ///< all root real parts < 0
  bool hurwitz_predicate = false;  ///< Routh-Hurwitz on the coefficients
  /// Max real part of the sign-flipped variant tau r^3 + alpha r^2
  /// - b mu r - c2 mu, reported for transparency only; verdicts use the
  /// cubic below.
  double printed_max_real_part = 0.0;
};

/// Roots of the per-mode characteristic cubic
///   tau r^3 + alpha r^2 + b mu r + c2 mu = 0
/// (Cardano with a Newton polish, sorted by real then imaginary part).
/// The Routh-Hurwitz predicate for this cubic reduces to alpha*b > tau*c2,
/// i.e. exactly gamma > 0.
StabilityVerdict characteristic_roots(const MgtParameters& p, double mu);

/// C1 = min{1 - 1/(1 + C0/2), C0/2}, the constructive constant in
/// |f+g|^2 + C0 |g|^2 >= C1 (|f|^2 + |g|^2).
double square_lemma_constant(double c0);

struct RatioBounds {
  double lo = 0.0;
  double hi = 0.0;
};

/// A-priori envelope for F0/E0 along any trajectory, assembled by applying
/// the square-expansion bound to each grouped term of E0. Requires
/// gamma > 0 and an interior k.
RatioBounds f0_over_e0_bounds(const MgtParameters& p, double k, double lambda0);

}  // namespace mgt
