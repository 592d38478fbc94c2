#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace mgt {

/// Which field enters the viscoelastic convolution g * A w:
/// w = u (type1), w = u_t (type2), w = lambda*u + u_t (type3).
enum class MemoryType { none, type1, type2, type3 };

/// gamma > 0 carries frictional damping (noncritical); gamma = 0 leaves a
/// conservative core (critical).
enum class Regime { noncritical, critical };

std::string to_string(MemoryType t);
std::string to_string(Regime r);

/// Relative tolerance on gamma (against max(alpha, c2*tau/b)) below which a
/// parameter set counts as critical.
inline constexpr double kCriticalRelTol = 1e-12;

/// Physical parameters of the third-order-in-time acoustic model
///
///   tau u_ttt + alpha u_tt + c2 A u + b A u_t - g * A w = 0.
///
/// k is the multiplier weight used by the natural energies; the default is
/// the midpoint of the admissible interval (c2/b, alpha/tau) when gamma > 0
/// and c2/b otherwise.
struct MgtParameters {
  double tau = 1.0;    ///< relaxation time, > 0
  double alpha = 1.0;  ///< friction, > 0
  double b = 1.0;      ///< diffusivity, > 0
  double c2 = 1.0;     ///< squared sound speed, > 0
  MemoryType memory_type = MemoryType::none;
  double lambda = 0.0;  ///< type-3 mixing weight, zero otherwise
  double k = 1.0;       ///< multiplier weight for the natural energies

  /// Validates positivity and derives k unless k_override is given; an
  /// override outside the closed admissible range throws.
  static MgtParameters create(double tau, double alpha, double b, double c2,
                              MemoryType memory_type = MemoryType::none,
                              double lambda = 0.0,
                              std::optional<double> k_override = {});
};

/// gamma = alpha - c2*tau/b.
double gamma(const MgtParameters& p);

Regime regime(const MgtParameters& p);

/// Open interval of admissible multiplier weights.
struct KInterval {
  double lo = 0.0;
  double hi = 0.0;
  double midpoint() const { return 0.5 * (lo + hi); }
};

/// (c2/b, alpha/tau) when gamma > 0, empty otherwise.
std::optional<KInterval> admissible_k_interval(const MgtParameters& p);

enum class AssumptionId { A0_kernel, A1_type1, A2_type2, A31_type3, A32_type3cr };

std::string to_string(AssumptionId id);
std::optional<AssumptionId> assumption_id_from_string(const std::string& name);

/// Machine-checkable verdict for one hypothesis on (parameters, kernel).
/// A satisfied report carries the numbers that make it re-checkable
/// (c0, G_infinity, a feasibility pair (k, theta), ...); a violated one
/// names the failing clauses.
struct AssumptionReport {
  AssumptionId id = AssumptionId::A0_kernel;
  bool satisfied = false;
  std::map<std::string, double> witnesses;
  std::vector<std::string> violations;
};

class MemoryKernel;

/// Checks one assumption. Infeasibility is reported, not thrown; only a
/// structurally invalid kernel is an error.
AssumptionReport check_assumption(const MgtParameters& p,
                                  const MemoryKernel& kernel, AssumptionId id);

/// Every assumption that applies to the run's memory type and regime, in a
/// fixed order (A0 first when the kernel is nonzero).
std::vector<AssumptionReport> applicable_assumptions(const MgtParameters& p,
                                                     const MemoryKernel& kernel);

}  // namespace mgt
