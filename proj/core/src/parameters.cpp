#include "mgt/parameters.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "mgt/kernel.hpp"

namespace mgt {

std::string to_string(MemoryType t) {
  switch (t) {
    case MemoryType::none: return "none";
    case MemoryType::type1: return "type1";
    case MemoryType::type2: return "type2";
    case MemoryType::type3: return "type3";
  }
  return "none";
}

std::string to_string(Regime r) {
  return r == Regime::critical ? "critical" : "noncritical";
}

std::string to_string(AssumptionId id) {
  switch (id) {
    case AssumptionId::A0_kernel: return "A0_kernel";
    case AssumptionId::A1_type1: return "A1_type1";
    case AssumptionId::A2_type2: return "A2_type2";
    case AssumptionId::A31_type3: return "A31_type3";
    case AssumptionId::A32_type3cr: return "A32_type3cr";
  }
  return "A0_kernel";
}

std::optional<AssumptionId> assumption_id_from_string(const std::string& name) {
  if (name == "A0_kernel") return AssumptionId::A0_kernel;
  if (name == "A1_type1") return AssumptionId::A1_type1;
  if (name == "A2_type2") return AssumptionId::A2_type2;
  if (name == "A31_type3") return AssumptionId::A31_type3;
  if (name == "A32_type3cr") return AssumptionId::A32_type3cr;
  return std::nullopt;
}

double gamma(const MgtParameters& p) { return p.alpha - p.c2 * p.tau / p.b; }

Regime regime(const MgtParameters& p) {
  const double scale = std::max(p.alpha, p.c2 * p.tau / p.b);
  return std::abs(gamma(p)) <= kCriticalRelTol * scale ? Regime::critical
                                                       : Regime::noncritical;
}

std::optional<KInterval> admissible_k_interval(const MgtParameters& p) {
  if (gamma(p) <= 0.0) return std::nullopt;
  return KInterval{p.c2 / p.b, p.alpha / p.tau};
}

MgtParameters MgtParameters::create(double tau, double alpha, double b, double c2,
                                    MemoryType memory_type, double lambda,
                                    std::optional<double> k_override) {
  if (!(tau > 0.0) || !std::isfinite(tau)) throw std::invalid_argument("tau must be > 0");
  if (!(alpha > 0.0) || !std::isfinite(alpha)) throw std::invalid_argument("alpha must be > 0");
  if (!(b > 0.0) || !std::isfinite(b)) throw std::invalid_argument("b must be > 0");
  if (!(c2 > 0.0) || !std::isfinite(c2)) throw std::invalid_argument("c2 must be > 0");
  if (lambda < 0.0 || !std::isfinite(lambda)) throw std::invalid_argument("lambda must be >= 0");
  if (memory_type != MemoryType::type3 && lambda != 0.0)
    throw std::invalid_argument("lambda must be zero unless memory_type is type3");

  MgtParameters p;
  p.tau = tau;
  p.alpha = alpha;
  p.b = b;
  p.c2 = c2;
  p.memory_type = memory_type;
  p.lambda = lambda;

  const auto interval = admissible_k_interval(p);
  if (k_override) {
    const double k = *k_override;
    if (!(k > 0.0) || !std::isfinite(k)) throw std::invalid_argument("k must be > 0");
    if (regime(p) == Regime::critical) {
      const double kc = p.c2 / p.b;
      if (std::abs(k - kc) > kCriticalRelTol * std::max(1.0, kc))
        throw std::invalid_argument("critical regime requires k = c2/b = alpha/tau");
    } else if (interval) {
      if (k < interval->lo || k > interval->hi)
        throw std::invalid_argument("k outside the closed admissible interval [c2/b, alpha/tau]");
    } else {
      throw std::invalid_argument("no admissible k exists for gamma < 0");
    }
    p.k = k;
  } else {
    // Midpoint keeps the damper coefficients well away from both degenerate
    // endpoints; without a positive gamma the left endpoint is the only
    // distinguished value.
    p.k = interval ? interval->midpoint() : p.c2 / p.b;
  }
  return p;
}

namespace {

void require_clause(AssumptionReport& report, bool ok, const std::string& clause) {
  if (!ok) report.violations.push_back(clause);
}

// Feasibility search for the type-2 kernel-strength hypothesis: k on a
// 64-point interior grid of (c2/b, alpha/tau), theta on a 64-point log grid
// of (k/c0, 1e3 * k/c0); first pair with k/theta < c0 and
// G(inf) <= min{2(bk - c2)/(2 + theta), b - c2/k} wins.
struct FeasiblePair {
  double k = 0.0, theta = 0.0, bound = 0.0;
};

std::optional<FeasiblePair> search_k_theta(const MgtParameters& p, double c0,
                                           double g_inf, int grid_points) {
  const auto interval = admissible_k_interval(p);
  if (!interval) return std::nullopt;
  for (int i = 0; i < grid_points; ++i) {
    const double k = interval->lo +
                     (interval->hi - interval->lo) * (i + 0.5) / grid_points;
    if (!(c0 > 0.0)) continue;
    const double theta_lo = k / c0;
    for (int m = 0; m < grid_points; ++m) {
      const double theta =
          std::isfinite(theta_lo)
              ? theta_lo * std::pow(10.0, 3.0 * m / (grid_points - 1))
              : 1.0;  // zero kernel: any theta works
      if (!(k / theta < c0)) continue;
      const double bound = std::min(2.0 * (p.b * k - p.c2) / (2.0 + theta),
                                    p.b - p.c2 / k);
      if (g_inf <= bound) return FeasiblePair{k, theta, bound};
      if (!std::isfinite(theta_lo)) break;
    }
  }
  return std::nullopt;
}

}  // namespace

AssumptionReport check_assumption(const MgtParameters& p,
                                  const MemoryKernel& kernel, AssumptionId id) {
  if (id == AssumptionId::A0_kernel) {
    return kernel.validate_assumption_A0();
  }

  AssumptionReport report;
  report.id = id;
  const double g = gamma(p);
  const double g_inf = kernel.g_infinity();
  report.witnesses["gamma"] = g;
  report.witnesses["G_infinity"] = g_inf;

  switch (id) {
    case AssumptionId::A1_type1:
      require_clause(report, g > 0.0, "gamma_positive");
      require_clause(report, g_inf < p.c2, "G_infinity_lt_c2");
      report.witnesses["c2"] = p.c2;
      break;
    case AssumptionId::A2_type2: {
      require_clause(report, g > 0.0, "gamma_positive");
      const double c0 = kernel.c0();
      report.witnesses["c0"] = c0;
      if (kernel.is_zero()) {
        // Vacuous: the convolution is absent, any interior k qualifies.
        report.witnesses["k"] = p.k;
        report.witnesses["theta"] = std::numeric_limits<double>::infinity();
        break;
      }
      const auto pair = search_k_theta(p, c0, g_inf, 64);
      if (pair) {
        report.witnesses["k"] = pair->k;
        report.witnesses["theta"] = pair->theta;
        report.witnesses["G_bound"] = pair->bound;
      } else {
        report.violations.push_back("feasible_k_theta");
      }
      break;
    }
    case AssumptionId::A31_type3: {
      require_clause(report, g > 0.0, "gamma_positive");
      const auto interval = admissible_k_interval(p);
      const bool lambda_ok = interval && p.lambda > interval->lo && p.lambda < interval->hi;
      require_clause(report, lambda_ok, "lambda_in_open_interval");
      report.witnesses["lambda"] = p.lambda;
      if (p.lambda > 0.0) {
        report.witnesses["c2_over_lambda"] = p.c2 / p.lambda;
        require_clause(report, g_inf < p.c2 / p.lambda, "G_infinity_lt_c2_over_lambda");
      } else {
        report.violations.push_back("G_infinity_lt_c2_over_lambda");
      }
      break;
    }
    case AssumptionId::A32_type3cr: {
      require_clause(report, regime(p) == Regime::critical, "gamma_zero");
      const double target = p.alpha / p.tau;
      const bool lambda_ok =
          std::abs(p.lambda - target) <= kCriticalRelTol * std::max(1.0, target);
      require_clause(report, lambda_ok, "lambda_eq_alpha_over_tau");
      report.witnesses["lambda"] = p.lambda;
      if (p.lambda > 0.0) {
        report.witnesses["c2_over_lambda"] = p.c2 / p.lambda;
        require_clause(report, g_inf < p.c2 / p.lambda, "G_infinity_lt_c2_over_lambda");
      } else {
        report.violations.push_back("G_infinity_lt_c2_over_lambda");
      }
      break;
    }
    case AssumptionId::A0_kernel:
      break;  // handled above
  }

  report.satisfied = report.violations.empty();
  return report;
}

std::vector<AssumptionReport> applicable_assumptions(const MgtParameters& p,
                                                     const MemoryKernel& kernel) {
  std::vector<AssumptionReport> reports;
  if (!kernel.is_zero())
    reports.push_back(check_assumption(p, kernel, AssumptionId::A0_kernel));
  switch (p.memory_type) {
    case MemoryType::none:
      break;
    case MemoryType::type1:
      reports.push_back(check_assumption(p, kernel, AssumptionId::A1_type1));
      break;
    case MemoryType::type2:
      reports.push_back(check_assumption(p, kernel, AssumptionId::A2_type2));
      break;
    case MemoryType::type3:
      reports.push_back(check_assumption(
          p, kernel,
          regime(p) == Regime::critical ? AssumptionId::A32_type3cr
                                        : AssumptionId::A31_type3));
      break;
  }
  return reports;
}

}  // namespace mgt
