#include "mgt/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace mgt {

namespace {
constexpr double kTiny = 1e-300;
}

std::string_view to_string(IdentityId id) {
  switch (id) {
    case IdentityId::E0R0: return "E0R0";
    case IdentityId::E1R1: return "E1R1";
    case IdentityId::E2R2: return "E2R2";
    case IdentityId::E3R3: return "E3R3";
    case IdentityId::E3crR3cr: return "E3crR3cr";
    case IdentityId::E11m_id: return "E11m_id";
    case IdentityId::E12m_id: return "E12m_id";
  }
  return "?";
}

std::string_view to_string(SignConvention c) {
  return c == SignConvention::printed ? "printed" : "sign_corrected";
}

DecayFit fit_decay_rate(std::span<const double> series, const TimeGrid& grid,
                        double window_fraction) {
  if (series.size() != grid.n_points())
    throw std::invalid_argument("series length does not match the grid");
  if (!(window_fraction > 0.0) || !(window_fraction < 1.0))
    throw std::invalid_argument("window_fraction must lie in (0, 1)");

  const double t_start = grid.t_end * (1.0 - window_fraction);
  std::size_t i_start = static_cast<std::size_t>(std::ceil(t_start / grid.h - 1e-9));
  if (i_start + 2 > series.size()) i_start = series.size() - 2;

  DecayFit fit;
  fit.window_start = grid.time(i_start);
  fit.window_end = grid.t_end;

  double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
  for (std::size_t i = i_start; i < series.size(); ++i) {
    if (!(series[i] > 0.0))
      throw std::domain_error("fit window contains a nonpositive value");
    lo = std::min(lo, series[i]);
    hi = std::max(hi, series[i]);
  }
  if (lo == hi) {  // constant data: the rate is exactly zero
    fit.omega = 0.0;
    fit.C = series[i_start] / series[0];
    fit.r_squared = 1.0;
    return fit;
  }

  const std::size_t m = series.size() - i_start;
  double st = 0.0, sy = 0.0;
  for (std::size_t i = i_start; i < series.size(); ++i) {
    st += grid.time(i);
    sy += std::log(series[i]);
  }
  const double tbar = st / m, ybar = sy / m;
  double stt = 0.0, sty = 0.0;
  for (std::size_t i = i_start; i < series.size(); ++i) {
    const double dt = grid.time(i) - tbar;
    sty += dt * (std::log(series[i]) - ybar);
    stt += dt * dt;
  }
  const double slope = sty / stt;
  const double intercept = ybar - slope * tbar;

  double ss_res = 0.0, ss_tot = 0.0;
  for (std::size_t i = i_start; i < series.size(); ++i) {
    const double y = std::log(series[i]);
    const double r = y - (intercept + slope * grid.time(i));
    ss_res += r * r;
    ss_tot += (y - ybar) * (y - ybar);
  }

  fit.omega = -slope;
  fit.C = std::exp(intercept) / series[0];
  fit.r_squared = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0;
  return fit;
}

namespace {

struct AuditFields {
  LedgerField energy;
  LedgerField printed;
  LedgerField corrected;
  std::optional<LedgerField> target;  // memory product the pieces audit against
};

AuditFields audit_fields(const EnergyLedger& ledger, IdentityId id) {
  switch (id) {
    case IdentityId::E0R0: {
      const LedgerField e =
          ledger.has(LedgerField::E0) ? LedgerField::E0 : LedgerField::E0cr;
      return {e, LedgerField::R0, LedgerField::R0, {}};
    }
    case IdentityId::E1R1:
      return {LedgerField::E1, LedgerField::R1_printed, LedgerField::R1, {}};
    case IdentityId::E2R2:
      return {LedgerField::E2, LedgerField::R2, LedgerField::R2_flipped, {}};
    case IdentityId::E3R3:
      return {LedgerField::E3, LedgerField::R3, LedgerField::R3_flipped, {}};
    case IdentityId::E3crR3cr:
      return {LedgerField::E3cr, LedgerField::R3cr, LedgerField::R3cr_flipped, {}};
    case IdentityId::E11m_id:
      return {LedgerField::E11m, LedgerField::R11m, LedgerField::R11m_corrected,
              LedgerField::mem_utt};
    case IdentityId::E12m_id:
      return {LedgerField::E12m, LedgerField::R12m, LedgerField::R12m_corrected,
              LedgerField::mem_ut};
  }
  return {LedgerField::E0, LedgerField::R0, LedgerField::R0, {}};
}

IdentityAuditResult audit_one(const EnergyLedger& ledger, IdentityId id,
                              SignConvention convention, const std::vector<double>& e,
                              const std::vector<double>& r,
                              const std::vector<double>* target, double h,
                              double t_end) {
  const std::size_t n = e.size();
  IdentityAuditResult out;
  out.identity = id;
  out.convention = convention;

  double d_scale = 0.0, r_scale = 0.0, e_scale = 0.0;
  std::vector<double> raw(n >= 5 ? n - 4 : 0, 0.0);
  for (std::size_t i = 2; i + 2 < n; ++i) {
    const double dEdt =
        (e[i - 2] - 8.0 * e[i - 1] + 8.0 * e[i + 1] - e[i + 2]) / (12.0 * h);
    const double rhs = r[i] - (target ? (*target)[i] : 0.0);
    raw[i - 2] = dEdt + rhs;
    d_scale = std::max(d_scale, std::abs(dEdt));
    r_scale = std::max(r_scale, std::abs(rhs));
  }
  for (double v : e) e_scale = std::max(e_scale, std::abs(v));

  // With a vanishing damper (conservative runs) the spec normalization
  // degenerates to residual/residual; the energy scale over the horizon
  // stands in so refinement still drives the report to zero.
  double scale = std::max(d_scale, r_scale);
  if (r_scale <= 1e-12 * e_scale / std::max(t_end, 1.0))
    scale = std::max(e_scale / std::max(t_end, 1.0), kTiny);
  scale = std::max(scale, kTiny);

  out.scale = scale;
  out.residual_series.resize(raw.size());
  for (std::size_t i = 0; i < raw.size(); ++i) {
    out.raw_max_residual = std::max(out.raw_max_residual, std::abs(raw[i]));
    out.residual_series[i] = raw[i] / scale;
  }
  out.max_abs_residual = out.raw_max_residual / scale;
  return out;
}

}  // namespace

std::array<IdentityAuditResult, 2> identity_audit(const Trajectory& traj,
                                                  const EnergyLedger& ledger,
                                                  IdentityId id) {
  if (traj.n_points() < 5)
    throw std::invalid_argument("identity audit needs at least 5 grid points");
  const AuditFields fields = audit_fields(ledger, id);
  const auto& e = ledger.at(fields.energy);
  const std::vector<double>* target =
      fields.target ? &ledger.at(*fields.target) : nullptr;
  const double h = traj.grid().h;
  const double t_end = traj.grid().t_end;
  return {audit_one(ledger, id, SignConvention::printed, e, ledger.at(fields.printed),
                    target, h, t_end),
          audit_one(ledger, id, SignConvention::sign_corrected, e,
                    ledger.at(fields.corrected), target, h, t_end)};
}

const IdentityAuditResult& winning(const std::array<IdentityAuditResult, 2>& results) {
  return results[0].max_abs_residual <= results[1].max_abs_residual ? results[0]
                                                                    : results[1];
}

double estimate_refinement_order(std::span<const double> hs,
                                 std::span<const double> residuals) {
  if (hs.size() != residuals.size() || hs.size() < 2)
    throw std::invalid_argument("order estimate needs matching h/residual lists, >= 2 entries");
  const std::size_t m = hs.size();
  double sx = 0.0, sy = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    sx += std::log(hs[i]);
    sy += std::log(std::max(residuals[i], kTiny));
  }
  const double xbar = sx / m, ybar = sy / m;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    const double dx = std::log(hs[i]) - xbar;
    sxy += dx * (std::log(std::max(residuals[i], kTiny)) - ybar);
    sxx += dx * dx;
  }
  return sxy / sxx;
}

RefinedAudit identity_audit_refined(const MgtParameters& params,
                                    const OperatorSpectrum& spectrum,
                                    const MemoryKernel& kernel,
                                    const InitialState& initial,
                                    const TimeGrid& coarsest, IntegrationPath path,
                                    IdentityId id, int levels) {
  if (levels < 1) throw std::invalid_argument("levels must be >= 1");

  RefinedAudit out;
  std::vector<double> res_printed, res_corrected;
  std::array<IdentityAuditResult, 2> finest{};
  for (int l = 0; l < levels; ++l) {
    const double h = coarsest.h / static_cast<double>(1 << l);
    const TimeGrid grid = TimeGrid::create(coarsest.t_end, h);
    const Trajectory traj = simulate(params, spectrum, kernel, initial, grid, path);
    const EnergyLedger ledger = evaluate_ledger(traj);
    finest = identity_audit(traj, ledger, id);
    out.hs.push_back(h);
    res_printed.push_back(finest[0].max_abs_residual);
    res_corrected.push_back(finest[1].max_abs_residual);
  }
  if (levels >= 2) {
    finest[0].refinement_order = estimate_refinement_order(out.hs, res_printed);
    finest[1].refinement_order = estimate_refinement_order(out.hs, res_corrected);
  }
  out.winner = winning(finest).convention;
  out.residuals = out.winner == SignConvention::printed ? res_printed : res_corrected;
  out.finest = finest;
  return out;
}

EquivalenceConstants equivalence_constants(std::span<const double> a,
                                           std::span<const double> b) {
  if (a.size() != b.size() || a.empty())
    throw std::invalid_argument("series must be nonempty and of equal length");
  EquivalenceConstants out;
  out.c1 = std::numeric_limits<double>::infinity();
  out.c2 = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (!(a[i] > 0.0) || !(b[i] > 0.0))
      throw std::invalid_argument("equivalence constants need positive series");
    const double r = a[i] / b[i];
    out.c1 = std::min(out.c1, r);
    out.c2 = std::max(out.c2, r);
  }
  return out;
}

GronwallCheck gronwall_integral_check(std::span<const double> series,
                                      const TimeGrid& grid) {
  if (series.size() != grid.n_points())
    throw std::invalid_argument("series length does not match the grid");
  for (double v : series)
    if (v < 0.0) throw std::invalid_argument("series must be nonnegative");

  const std::size_t n = series.size();
  const double h = grid.h;
  std::vector<double> tail(n, 0.0);
  for (std::size_t i = n - 1; i-- > 0;)
    tail[i] = tail[i + 1] + 0.5 * h * (series[i] + series[i + 1]);

  const std::size_t i_half = (n - 1) / 2;
  const std::size_t i_quarter = i_half / 2;
  bool zero_division = false;

  auto sup_ratio = [&](std::size_t limit, double tail_offset) {
    double sup = 0.0;
    for (std::size_t i = 0; i <= limit; ++i) {
      const double integral = tail[i] - tail_offset;
      if (series[i] > 0.0) {
        sup = std::max(sup, integral / series[i]);
      } else if (integral > kTiny) {
        zero_division = true;  // zero value with mass still to come
      }
    }
    return sup;
  };

  GronwallCheck out;
  out.c_est = sup_ratio(i_half, 0.0);
  out.c_est_inner = sup_ratio(i_quarter, tail[i_half]);
  // horizon stability over a fixed sup range: same t in [0, t_end/4], tail
  // integral cut at t_end/2 versus t_end
  const double matched_full = sup_ratio(i_quarter, 0.0);
  out.satisfied = !zero_division && std::isfinite(out.c_est) &&
                  std::abs(matched_full - out.c_est_inner) <=
                      0.1 * std::max(matched_full, kTiny);
  return out;
}

namespace {

using cplx = std::complex<double>;

// Monic cubic x^3 + a2 x^2 + a1 x + a0 by Cardano, Newton-polished.
std::array<cplx, 3> solve_monic_cubic(double a2, double a1, double a0) {
  const double p = a1 - a2 * a2 / 3.0;
  const double q = 2.0 * a2 * a2 * a2 / 27.0 - a2 * a1 / 3.0 + a0;

  std::array<cplx, 3> roots;
  if (std::abs(p) < 1e-300 && std::abs(q) < 1e-300) {
    roots.fill(cplx(-a2 / 3.0, 0.0));
  } else {
    const cplx disc = cplx(q * q / 4.0 + p * p * p / 27.0, 0.0);
    const cplx s = std::sqrt(disc);
    // pick the better-conditioned cube-root argument
    const cplx c1 = cplx(-q / 2.0, 0.0) + s;
    const cplx c2 = cplx(-q / 2.0, 0.0) - s;
    const cplx base = std::abs(c1) >= std::abs(c2) ? c1 : c2;
    const cplx u = std::pow(base, 1.0 / 3.0);
    const cplx omega(-0.5, 0.5 * std::sqrt(3.0));
    for (int k = 0; k < 3; ++k) {
      const cplx uk = u * std::pow(omega, k);
      const cplx y = uk - cplx(p, 0.0) / (3.0 * uk);
      roots[k] = y - a2 / 3.0;
    }
  }

  auto poly = [&](cplx x) { return ((x + a2) * x + a1) * x + a0; };
  auto dpoly = [&](cplx x) { return (3.0 * x + 2.0 * a2) * x + a1; };
  for (auto& r : roots)
    for (int it = 0; it < 4; ++it) {
      const cplx d = dpoly(r);
      if (std::abs(d) < 1e-300) break;
      r -= poly(r) / d;
    }

  // components below machine noise relative to the root magnitude are
  // artifacts of the polish; snap them so axis roots give stable verdicts
  for (auto& r : roots) {
    const double mag = std::max(1.0, std::abs(r));
    double re = r.real(), im = r.imag();
    if (std::abs(re) < 1e-14 * mag) re = 0.0;
    if (std::abs(im) < 1e-14 * mag) im = 0.0;
    r = cplx(re, im);
  }

  std::sort(roots.begin(), roots.end(), [](const cplx& x, const cplx& y) {
    if (x.real() != y.real()) return x.real() < y.real();
    return x.imag() < y.imag();
  });
  return roots;
}

}  // namespace

StabilityVerdict characteristic_roots(const MgtParameters& p, double mu) {
  if (!(mu > 0.0) || !std::isfinite(mu))
    throw std::invalid_argument("mu must be > 0");

  StabilityVerdict v;
  v.mu = mu;
  v.roots = solve_monic_cubic(p.alpha / p.tau, p.b * mu / p.tau, p.c2 * mu / p.tau);

  v.max_real_part = -std::numeric_limits<double>::infinity();
  for (const auto& r : v.roots) v.max_real_part = std::max(v.max_real_part, r.real());
  v.hurwitz = v.max_real_part < 0.0;
  v.hurwitz_predicate = p.tau > 0.0 && p.alpha > 0.0 && p.b * mu > 0.0 &&
                        p.c2 * mu > 0.0 &&
                        p.alpha * p.b * mu - p.tau * p.c2 * mu > 0.0;

  const auto printed =
      solve_monic_cubic(p.alpha / p.tau, -p.b * mu / p.tau, -p.c2 * mu / p.tau);
  v.printed_max_real_part = -std::numeric_limits<double>::infinity();
  for (const auto& r : printed)
    v.printed_max_real_part = std::max(v.printed_max_real_part, r.real());
  return v;
}

double square_lemma_constant(double c0) {
  if (!(c0 > 0.0)) throw std::invalid_argument("C0 must be > 0");
  return std::min(1.0 - 1.0 / (1.0 + 0.5 * c0), 0.5 * c0);
}

RatioBounds f0_over_e0_bounds(const MgtParameters& p, double k, double lambda0) {
  const auto interval = admissible_k_interval(p);
  if (!interval || !(k > interval->lo) || !(k < interval->hi))
    throw std::invalid_argument("ratio bounds need gamma > 0 and an interior k");

  const double c01 = (k - p.c2 / p.b) * p.b / p.c2;
  const double c02 = (p.alpha / p.tau - k) / k;
  const double l1 = square_lemma_constant(c01);
  const double l2 = square_lemma_constant(c02);
  const double m =
      std::min({p.b * l1, (p.c2 * p.c2 / p.b) * l1, p.tau * l2});

  const double coef_ah_ut =
      2.0 * p.b +
      lambda0 * lambda0 * (2.0 * p.tau * k * k + k * p.tau * (p.alpha / p.tau - k));
  const double coef_ah_u = 2.0 * p.c2 * p.c2 / p.b + p.c2 * (k - p.c2 / p.b);
  const double coef_utt = 2.0 * p.tau;
  const double c2p = std::max({coef_ah_ut, coef_ah_u, coef_utt});

  return {1.0 / c2p, 1.0 / m};
}

}  // namespace mgt
