#include "mgt/energy.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace mgt {

std::string_view to_string(LedgerField f) {
  switch (f) {
    case LedgerField::F0: return "F0";
    case LedgerField::F1: return "F1";
    case LedgerField::F2: return "F2";
    case LedgerField::F3: return "F3";
    case LedgerField::F3cr: return "F3cr";
    case LedgerField::E0: return "E0";
    case LedgerField::E0cr: return "E0cr";
    case LedgerField::E01: return "E01";
    case LedgerField::E02: return "E02";
    case LedgerField::E1: return "E1";
    case LedgerField::E2: return "E2";
    case LedgerField::E3: return "E3";
    case LedgerField::E3cr: return "E3cr";
    case LedgerField::Ehat1: return "Ehat1";
    case LedgerField::Ehat2: return "Ehat2";
    case LedgerField::Ehat: return "Ehat";
    case LedgerField::R0: return "R0";
    case LedgerField::R1: return "R1";
    case LedgerField::R2: return "R2";
    case LedgerField::R3: return "R3";
    case LedgerField::R3cr: return "R3cr";
    case LedgerField::E11m: return "E11m";
    case LedgerField::R11m: return "R11m";
    case LedgerField::E12m: return "E12m";
    case LedgerField::R12m: return "R12m";
    case LedgerField::g_circ_u: return "g_circ_u";
    case LedgerField::g_circ_ut: return "g_circ_ut";
    case LedgerField::g_circ_w: return "g_circ_w";
    case LedgerField::R1_printed: return "R1_printed";
    case LedgerField::R11m_corrected: return "R11m_corrected";
    case LedgerField::R12m_corrected: return "R12m_corrected";
    case LedgerField::R2_flipped: return "R2_flipped";
    case LedgerField::R3_flipped: return "R3_flipped";
    case LedgerField::R3cr_flipped: return "R3cr_flipped";
    case LedgerField::mem_utt: return "mem_utt";
    case LedgerField::mem_ut: return "mem_ut";
  }
  return "?";
}

const std::vector<double>& EnergyLedger::at(LedgerField f) const {
  const auto& slot = series_[index(f)];
  if (!slot)
    throw std::invalid_argument(std::string("ledger field not populated: ") +
                                std::string(to_string(f)));
  return *slot;
}

void EnergyLedger::set(LedgerField f, std::vector<double> values) {
  if (values.size() != grid_.n_points())
    throw std::invalid_argument("ledger series length does not match the grid");
  series_[index(f)] = std::move(values);
}

std::vector<LedgerField> EnergyLedger::populated() const {
  std::vector<LedgerField> out;
  for (std::size_t i = 0; i < kLedgerFieldCount; ++i)
    if (series_[i]) out.push_back(static_cast<LedgerField>(i));
  return out;
}

namespace {

enum class Field { u, ut, w };

// step-major flat copy of one trajectory field
std::vector<double> field_values(const Trajectory& traj, Field f) {
  const std::size_t n_pts = traj.n_points();
  const std::size_t n_modes = traj.n_modes();
  std::vector<double> out(n_pts * n_modes);
  for (std::size_t s = 0; s < n_pts; ++s)
    for (std::size_t i = 0; i < n_modes; ++i) {
      double v = 0.0;
      switch (f) {
        case Field::u: v = traj.u(s, i); break;
        case Field::ut: v = traj.ut(s, i); break;
        case Field::w: v = traj.w(s, i); break;
      }
      out[s * n_modes + i] = v;
    }
  return out;
}

// Trapezoid sums of one kernel derivative k_d against a per-mode field f on
// the trajectory grid, for every grid point n:
//
//   K0(n)    = int k_d(t_n - s) ds
//   S(n, i)  = int k_d(t_n - s) f_i(s) ds
//   Q(n)     = int k_d(t_n - s) sum_i mu_i f_i(s)^2 ds
//   circle(n)= int k_d(t_n - s) sum_i mu_i (f_i(t_n) - f_i(s))^2 ds
//            = K0(n) q(n) - 2 sum_i mu_i f_i(n) S(n, i) + Q(n).
//
// For exponential-sum kernels each accumulator satisfies the exact one-step
// recurrence
//   T(n+1) = e^{-r h} (T(n) + (h/2) w x_n) + (h/2) w x_{n+1},
// so the whole scan is O(n). Sampled kernels use the direct sum with kernel
// values precomputed on the grid offsets (O(n^2) over the run).
struct ConvScan {
  std::vector<double> K0;      // per grid point
  std::vector<double> S;       // [n * n_modes + i]
  std::vector<double> Q;       // per grid point
  std::vector<double> circle;  // per grid point, clamped at tiny negatives
};

ConvScan scan_convolution(const Trajectory& traj, int deriv,
                          const std::vector<double>& fvals) {
  const std::size_t n_pts = traj.n_points();
  const std::size_t n_modes = traj.n_modes();
  const double h = traj.grid().h;
  const auto& mu = traj.spectrum().eigenvalues;
  const MemoryKernel& kernel = traj.kernel();

  ConvScan scan;
  scan.K0.assign(n_pts, 0.0);
  scan.S.assign(n_pts * n_modes, 0.0);
  scan.Q.assign(n_pts, 0.0);
  scan.circle.assign(n_pts, 0.0);

  // weighted quadratic value per step, shared by Q and circle
  std::vector<double> q(n_pts, 0.0);
  for (std::size_t s = 0; s < n_pts; ++s) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n_modes; ++i) {
      const double v = fvals[s * n_modes + i];
      acc += mu[i] * v * v;
    }
    q[s] = acc;
  }

  if (kernel.is_zero()) return scan;

  auto finish_point = [&](std::size_t n) {
    double cross = 0.0;
    for (std::size_t i = 0; i < n_modes; ++i)
      cross += mu[i] * fvals[n * n_modes + i] * scan.S[n * n_modes + i];
    double c = scan.K0[n] * q[n] - 2.0 * cross + scan.Q[n];
    // algebraically >= 0 for deriv 0 and 2; absorb roundoff cancellation
    if (deriv != 1 && c < 0.0) {
      const double ref = scan.K0[n] * q[n] + 2.0 * std::abs(cross) + std::abs(scan.Q[n]);
      if (c > -1e-9 * std::max(ref, 1e-300)) c = 0.0;
    }
    scan.circle[n] = c;
  };

  if (kernel.kind() == KernelKind::prony) {
    const auto terms = kernel.prony_terms(deriv);
    const std::size_t m = terms.size();
    std::vector<double> decay(m);
    for (std::size_t j = 0; j < m; ++j) decay[j] = std::exp(-terms[j].rate * h);

    std::vector<double> tk(m, 0.0), tq(m, 0.0);
    std::vector<double> ts(m * n_modes, 0.0);
    for (std::size_t n = 1; n < n_pts; ++n) {
      double k0 = 0.0, qq = 0.0;
      for (std::size_t j = 0; j < m; ++j) {
        const double w = terms[j].weight;
        const double d = decay[j];
        tk[j] = d * (tk[j] + 0.5 * h * w) + 0.5 * h * w;
        tq[j] = d * (tq[j] + 0.5 * h * w * q[n - 1]) + 0.5 * h * w * q[n];
        k0 += tk[j];
        qq += tq[j];
        double* row = ts.data() + j * n_modes;
        const double* f_prev = fvals.data() + (n - 1) * n_modes;
        const double* f_cur = fvals.data() + n * n_modes;
        for (std::size_t i = 0; i < n_modes; ++i)
          row[i] = d * (row[i] + 0.5 * h * w * f_prev[i]) + 0.5 * h * w * f_cur[i];
      }
      scan.K0[n] = k0;
      scan.Q[n] = qq;
      double* s_row = scan.S.data() + n * n_modes;
      for (std::size_t j = 0; j < m; ++j) {
        const double* row = ts.data() + j * n_modes;
        for (std::size_t i = 0; i < n_modes; ++i) s_row[i] += row[i];
      }
      finish_point(n);
    }
    return scan;
  }

  // sampled: direct trapezoid with a kernel table on the grid offsets
  std::vector<double> kd(n_pts);
  for (std::size_t d = 0; d < n_pts; ++d) {
    const KernelPoint kp = kernel.eval(static_cast<double>(d) * h);
    kd[d] = deriv == 0 ? kp.g : deriv == 1 ? kp.g_prime : kp.g_double_prime;
  }
  for (std::size_t n = 1; n < n_pts; ++n) {
    double k0 = 0.0, qq = 0.0;
    double* s_row = scan.S.data() + n * n_modes;
    for (std::size_t s = 0; s <= n; ++s) {
      const double weight = (s == 0 || s == n) ? 0.5 : 1.0;
      const double kv = weight * kd[n - s];
      k0 += kv;
      qq += kv * q[s];
      const double* f_row = fvals.data() + s * n_modes;
      for (std::size_t i = 0; i < n_modes; ++i) s_row[i] += kv * f_row[i];
    }
    scan.K0[n] = k0 * h;
    scan.Q[n] = qq * h;
    for (std::size_t i = 0; i < n_modes; ++i) s_row[i] *= h;
    finish_point(n);
  }
  return scan;
}

// state aggregates shared by every functional
struct StateSums {
  std::vector<double> utt2, ah_ut2, ah_u2, ut2;
  std::vector<double> inner_u_ut, inner_utt_ut;
  std::vector<double> ah_w2, wt2;
  std::vector<double> ah_ut_c2bu2;  // |A^{1/2}(u_t + (c2/b) u)|^2
  std::vector<double> utt_kut2;     // |u_tt + k u_t|^2
  std::vector<double> utt_c2but2;   // |u_tt + (c2/b) u_t|^2
  std::vector<double> ah_ut_ku2;    // |A^{1/2}(u_t + k u)|^2
};

StateSums state_sums(const Trajectory& traj, double k) {
  const std::size_t n_pts = traj.n_points();
  const std::size_t n_modes = traj.n_modes();
  const auto& mu = traj.spectrum().eigenvalues;
  const MgtParameters& p = traj.params();
  const double c2b = p.c2 / p.b;

  StateSums s;
  auto init = [&](std::vector<double>& v) { v.assign(n_pts, 0.0); };
  init(s.utt2); init(s.ah_ut2); init(s.ah_u2); init(s.ut2);
  init(s.inner_u_ut); init(s.inner_utt_ut);
  init(s.ah_w2); init(s.wt2);
  init(s.ah_ut_c2bu2); init(s.utt_kut2); init(s.utt_c2but2); init(s.ah_ut_ku2);

  for (std::size_t n = 0; n < n_pts; ++n) {
    for (std::size_t i = 0; i < n_modes; ++i) {
      const double u = traj.u(n, i), v = traj.ut(n, i), a = traj.utt(n, i);
      const double w = traj.w(n, i), wt = traj.wt(n, i);
      const double m = mu[i];
      s.utt2[n] += a * a;
      s.ah_ut2[n] += m * v * v;
      s.ah_u2[n] += m * u * u;
      s.ut2[n] += v * v;
      s.inner_u_ut[n] += m * u * v;
      s.inner_utt_ut[n] += a * v;
      s.ah_w2[n] += m * w * w;
      s.wt2[n] += wt * wt;
      const double z1 = v + c2b * u;
      s.ah_ut_c2bu2[n] += m * z1 * z1;
      const double z2 = a + k * v;
      s.utt_kut2[n] += z2 * z2;
      const double z3 = a + c2b * v;
      s.utt_c2but2[n] += z3 * z3;
      const double z4 = v + k * u;
      s.ah_ut_ku2[n] += m * z4 * z4;
    }
  }
  return s;
}

void validate_k(const Trajectory& traj, double k) {
  const MgtParameters& p = traj.params();
  if (!(k > 0.0) || !std::isfinite(k)) throw std::invalid_argument("k must be > 0");
  if (regime(p) == Regime::critical) {
    const double kc = p.c2 / p.b;
    if (std::abs(k - kc) > kCriticalRelTol * std::max(1.0, kc))
      throw std::invalid_argument("critical regime requires k = c2/b = alpha/tau");
    return;
  }
  const auto interval = admissible_k_interval(p);
  if (!interval)
    throw std::invalid_argument("no admissible k exists for gamma < 0");
  if (k < interval->lo || k > interval->hi)
    throw std::invalid_argument("k outside the closed admissible interval [c2/b, alpha/tau]");
}

std::vector<double> kernel_on_grid(const Trajectory& traj, int which) {
  // which: 0 -> g(t), 1 -> g'(t), 3 -> G(t)
  const std::size_t n_pts = traj.n_points();
  std::vector<double> out(n_pts);
  for (std::size_t n = 0; n < n_pts; ++n) {
    const KernelPoint kp = traj.kernel().eval(traj.grid().time(n));
    out[n] = which == 0 ? kp.g : which == 1 ? kp.g_prime : kp.G;
  }
  return out;
}

}  // namespace

std::vector<double> standard_energy_series(const Trajectory& traj,
                                           StandardFunctional which) {
  const double k_ref = traj.params().k;
  const StateSums s = state_sums(traj, k_ref);
  const std::size_t n_pts = traj.n_points();
  std::vector<double> out(n_pts, 0.0);
  for (std::size_t n = 0; n < n_pts; ++n)
    out[n] = s.utt2[n] + s.ah_ut2[n] + s.ah_u2[n];

  switch (which) {
    case StandardFunctional::F0:
      return out;
    case StandardFunctional::F1: {
      const auto scan = scan_convolution(traj, 1, field_values(traj, Field::u));
      for (std::size_t n = 0; n < n_pts; ++n) out[n] -= scan.circle[n];
      return out;
    }
    case StandardFunctional::F2: {
      const auto scan = scan_convolution(traj, 0, field_values(traj, Field::ut));
      for (std::size_t n = 0; n < n_pts; ++n) out[n] += scan.circle[n];
      return out;
    }
    case StandardFunctional::F3: {
      const auto scan = scan_convolution(traj, 0, field_values(traj, Field::w));
      for (std::size_t n = 0; n < n_pts; ++n) out[n] += scan.circle[n];
      return out;
    }
    case StandardFunctional::F3cr: {
      const auto scan = scan_convolution(traj, 0, field_values(traj, Field::w));
      for (std::size_t n = 0; n < n_pts; ++n)
        out[n] = s.ah_w2[n] + s.wt2[n] + scan.circle[n];
      return out;
    }
  }
  return out;
}

std::vector<double> natural_energy_E0(const Trajectory& traj, double k) {
  validate_k(traj, k);
  const MgtParameters& p = traj.params();
  const StateSums s = state_sums(traj, k);
  const std::size_t n_pts = traj.n_points();
  std::vector<double> out(n_pts, 0.0);
  if (regime(p) == Regime::critical) {
    for (std::size_t n = 0; n < n_pts; ++n)
      out[n] = p.b * s.ah_ut_ku2[n] + p.tau * s.utt_kut2[n];
    return out;
  }
  for (std::size_t n = 0; n < n_pts; ++n)
    out[n] = p.b * s.ah_ut_c2bu2[n] + p.tau * s.utt_kut2[n] +
             k * p.tau * (p.alpha / p.tau - k) * s.ut2[n] +
             p.c2 * (k - p.c2 / p.b) * s.ah_u2[n];
  return out;
}

std::vector<double> damper_R0(const Trajectory& traj, double k) {
  validate_k(traj, k);
  const MgtParameters& p = traj.params();
  const std::size_t n_pts = traj.n_points();
  std::vector<double> out(n_pts, 0.0);
  if (regime(p) == Regime::critical) return out;  // both coefficients vanish
  const StateSums s = state_sums(traj, k);
  for (std::size_t n = 0; n < n_pts; ++n)
    out[n] = 2.0 * p.tau * (p.alpha / p.tau - k) * s.utt2[n] +
             2.0 * p.b * (k - p.c2 / p.b) * s.ah_ut2[n];
  return out;
}

HatEnergies hat_energies(const Trajectory& traj) {
  const MgtParameters& p = traj.params();
  const double g = gamma(p);
  const StateSums s = state_sums(traj, p.k);
  const std::size_t n_pts = traj.n_points();
  HatEnergies out;
  out.e1.resize(n_pts);
  out.e2.resize(n_pts);
  out.total.resize(n_pts);
  for (std::size_t n = 0; n < n_pts; ++n) {
    out.e1[n] = p.b * s.ah_ut_c2bu2[n] + p.tau * s.utt_c2but2[n] +
                (p.c2 / p.b) * g * s.ut2[n];
    out.e2[n] = p.alpha * s.ut2[n] + p.c2 * s.ah_u2[n];
    out.total[n] = out.e1[n] + out.e2[n];
  }
  return out;
}

MemoryIdentityPieces memory_identity_pieces(const Trajectory& traj) {
  if (traj.params().memory_type != MemoryType::type1)
    throw std::invalid_argument("memory identity pieces require a type-1 trajectory");
  const std::size_t n_pts = traj.n_points();
  const std::size_t n_modes = traj.n_modes();
  const auto& mu = traj.spectrum().eigenvalues;

  const auto fvals = field_values(traj, Field::u);
  const auto scan0 = scan_convolution(traj, 0, fvals);
  const auto scan1 = scan_convolution(traj, 1, fvals);
  const auto scan2 = scan_convolution(traj, 2, fvals);
  const auto g_t = kernel_on_grid(traj, 0);
  const auto gp_t = kernel_on_grid(traj, 1);
  const auto G_t = kernel_on_grid(traj, 3);
  const StateSums s = state_sums(traj, traj.params().k);

  MemoryIdentityPieces out;
  auto init = [&](std::vector<double>& v) { v.assign(n_pts, 0.0); };
  init(out.e11m); init(out.r11m); init(out.e12m); init(out.r12m);
  init(out.r11m_corrected); init(out.r12m_corrected);
  init(out.mem_utt); init(out.mem_ut);

  for (std::size_t n = 0; n < n_pts; ++n) {
    double cross_ut = 0.0, cross_utt = 0.0;
    for (std::size_t i = 0; i < n_modes; ++i) {
      const double Si = scan0.S[n * n_modes + i];
      cross_ut += mu[i] * traj.ut(n, i) * Si;
      cross_utt += mu[i] * traj.utt(n, i) * Si;
    }
    out.mem_ut[n] = -2.0 * cross_ut;
    out.mem_utt[n] = -2.0 * cross_utt;
    out.e11m[n] = -scan1.circle[n] + g_t[n] * s.ah_u2[n] - 2.0 * cross_ut;
    out.r11m[n] = -scan2.circle[n] + gp_t[n] * s.ah_u2[n];
    out.e12m[n] = scan0.circle[n] - G_t[n] * s.ah_u2[n];
    out.r12m[n] = scan1.circle[n] - g_t[n] * s.ah_u2[n];
    out.r11m_corrected[n] = -out.r11m[n];
    out.r12m_corrected[n] = -out.r12m[n];
  }
  return out;
}

CompositePair composite_energies(const Trajectory& traj, double k) {
  const MgtParameters& p = traj.params();
  const std::size_t n_pts = traj.n_points();
  const std::size_t n_modes = traj.n_modes();
  const auto& mu = traj.spectrum().eigenvalues;
  const bool critical = regime(p) == Regime::critical;

  CompositePair out;
  out.energy.assign(n_pts, 0.0);
  out.damper.assign(n_pts, 0.0);
  out.damper_flipped.assign(n_pts, 0.0);

  switch (p.memory_type) {
    case MemoryType::none:
      throw std::invalid_argument("composite energies require a memory type");
    case MemoryType::type1: {
      validate_k(traj, k);
      const auto pieces = memory_identity_pieces(traj);
      const auto e0 = natural_energy_E0(traj, k);
      const auto r0 = damper_R0(traj, k);
      for (std::size_t n = 0; n < n_pts; ++n) {
        out.energy[n] = e0[n] + pieces.e11m[n] + k * pieces.e12m[n];
        const double mem = pieces.r11m_corrected[n] + k * pieces.r12m_corrected[n];
        out.damper[n] = r0[n] + mem;          // (g''-kg') o A^{1/2}u + (kg-g')|A^{1/2}u|^2
        out.damper_flipped[n] = r0[n] - mem;  // as-printed piece assembly
      }
      return out;
    }
    case MemoryType::type2: {
      validate_k(traj, k);
      const auto fvals = field_values(traj, Field::ut);
      const auto scan0 = scan_convolution(traj, 0, fvals);
      const auto scan1 = scan_convolution(traj, 1, fvals);
      const auto g_t = kernel_on_grid(traj, 0);
      const auto G_t = kernel_on_grid(traj, 3);
      const StateSums s = state_sums(traj, k);
      for (std::size_t n = 0; n < n_pts; ++n) {
        out.energy[n] = (p.b - G_t[n]) * s.ah_ut2[n] + 2.0 * p.c2 * s.inner_u_ut[n] +
                        p.c2 * k * s.ah_u2[n] + p.tau * s.utt_kut2[n] +
                        k * p.tau * (p.alpha / p.tau - k) * s.ut2[n] + scan0.circle[n];
        double cross = 0.0;
        for (std::size_t i = 0; i < n_modes; ++i)
          cross += mu[i] * traj.ut(n, i) * scan0.S[n * n_modes + i];
        const double cross_term = scan0.K0[n] * s.ah_ut2[n] - cross;
        const double r0_part =
            2.0 * p.tau * (p.alpha / p.tau - k) * s.utt2[n] +
            2.0 * p.b * (k - p.c2 / p.b) * s.ah_ut2[n];
        const double mem = -scan1.circle[n] + g_t[n] * s.ah_ut2[n] -
                           2.0 * k * G_t[n] * s.ah_ut2[n] + 2.0 * k * cross_term;
        out.damper[n] = r0_part + mem;
        out.damper_flipped[n] = r0_part - mem;
      }
      return out;
    }
    case MemoryType::type3: {
      // the mixing weight doubles as the multiplier weight
      if (std::abs(k - p.lambda) > kCriticalRelTol * std::max(1.0, p.lambda))
        throw std::invalid_argument("type-3 composites require k = lambda");
      validate_k(traj, k);
      const auto fvals = field_values(traj, Field::w);
      const auto scan0 = scan_convolution(traj, 0, fvals);
      const auto scan1 = scan_convolution(traj, 1, fvals);
      const auto g_t = kernel_on_grid(traj, 0);
      const auto G_t = kernel_on_grid(traj, 3);
      const StateSums s = state_sums(traj, k);
      for (std::size_t n = 0; n < n_pts; ++n) {
        const double mem = g_t[n] * s.ah_w2[n] - scan1.circle[n];
        if (critical) {
          out.energy[n] = (p.c2 / k - G_t[n]) * s.ah_w2[n] + p.tau * s.wt2[n] +
                          scan0.circle[n];
          out.damper[n] = mem;
          out.damper_flipped[n] = -mem;
        } else {
          out.energy[n] = (p.c2 / k - G_t[n]) * s.ah_w2[n] +
                          (p.b - p.c2 / k) * s.ah_ut2[n] + p.tau * s.utt_kut2[n] +
                          k * p.tau * (p.alpha / p.tau - k) * s.ut2[n] +
                          scan0.circle[n];
          const double r0_part = 2.0 * (p.alpha - k * p.tau) * s.utt2[n] +
                                 2.0 * (p.b * k - p.c2) * s.ah_ut2[n];
          out.damper[n] = r0_part + mem;
          out.damper_flipped[n] = r0_part - mem;
        }
      }
      return out;
    }
  }
  return out;
}

EnergyLedger standard_energies(const Trajectory& traj) {
  EnergyLedger ledger(traj.grid());
  ledger.set(LedgerField::F0, standard_energy_series(traj, StandardFunctional::F0));
  switch (traj.params().memory_type) {
    case MemoryType::none:
      break;
    case MemoryType::type1:
      ledger.set(LedgerField::F1, standard_energy_series(traj, StandardFunctional::F1));
      ledger.set(LedgerField::g_circ_u,
                 scan_convolution(traj, 0, field_values(traj, Field::u)).circle);
      break;
    case MemoryType::type2:
      ledger.set(LedgerField::F2, standard_energy_series(traj, StandardFunctional::F2));
      ledger.set(LedgerField::g_circ_ut,
                 scan_convolution(traj, 0, field_values(traj, Field::ut)).circle);
      break;
    case MemoryType::type3:
      if (regime(traj.params()) == Regime::critical)
        ledger.set(LedgerField::F3cr,
                   standard_energy_series(traj, StandardFunctional::F3cr));
      else
        ledger.set(LedgerField::F3, standard_energy_series(traj, StandardFunctional::F3));
      ledger.set(LedgerField::g_circ_w,
                 scan_convolution(traj, 0, field_values(traj, Field::w)).circle);
      break;
  }
  return ledger;
}

EnergyLedger evaluate_ledger(const Trajectory& traj) {
  const MgtParameters& p = traj.params();
  const bool critical = regime(p) == Regime::critical;
  const double g = gamma(p);
  const double k = p.memory_type == MemoryType::type3 ? p.lambda : p.k;

  // composites only make sense with a usable multiplier weight
  bool k_usable = g >= 0.0 || critical;
  if (k_usable) {
    if (critical) {
      k_usable = std::abs(k - p.c2 / p.b) <= kCriticalRelTol * std::max(1.0, p.c2 / p.b);
    } else {
      const auto interval = admissible_k_interval(p);
      k_usable = interval && k >= interval->lo && k <= interval->hi;
    }
  }

  EnergyLedger ledger = standard_energies(traj);

  if (p.memory_type == MemoryType::none) {
    const StateSums s = state_sums(traj, p.k);
    const std::size_t n_pts = traj.n_points();
    std::vector<double> e01(n_pts), e02(n_pts);
    for (std::size_t n = 0; n < n_pts; ++n) {
      e01[n] = p.tau * s.utt2[n] + p.b * s.ah_ut2[n] + 2.0 * p.c2 * s.inner_u_ut[n];
      e02[n] = p.c2 * s.ah_u2[n] + p.alpha * s.ut2[n] + 2.0 * p.tau * s.inner_utt_ut[n];
    }
    ledger.set(LedgerField::E01, std::move(e01));
    ledger.set(LedgerField::E02, std::move(e02));
    const HatEnergies hat = hat_energies(traj);
    ledger.set(LedgerField::Ehat1, hat.e1);
    ledger.set(LedgerField::Ehat2, hat.e2);
    ledger.set(LedgerField::Ehat, hat.total);
    if (k_usable) {
      ledger.set(critical ? LedgerField::E0cr : LedgerField::E0,
                 natural_energy_E0(traj, p.k));
      ledger.set(LedgerField::R0, damper_R0(traj, p.k));
    }
    return ledger;
  }

  if (p.memory_type == MemoryType::type1) {
    const auto pieces = memory_identity_pieces(traj);
    ledger.set(LedgerField::E11m, pieces.e11m);
    ledger.set(LedgerField::R11m, pieces.r11m);
    ledger.set(LedgerField::E12m, pieces.e12m);
    ledger.set(LedgerField::R12m, pieces.r12m);
    ledger.set(LedgerField::R11m_corrected, pieces.r11m_corrected);
    ledger.set(LedgerField::R12m_corrected, pieces.r12m_corrected);
    ledger.set(LedgerField::mem_utt, pieces.mem_utt);
    ledger.set(LedgerField::mem_ut, pieces.mem_ut);
  }

  if (!k_usable) return ledger;

  if (p.memory_type != MemoryType::type3 || !critical) {
    ledger.set(critical ? LedgerField::E0cr : LedgerField::E0,
               natural_energy_E0(traj, k));
    ledger.set(LedgerField::R0, damper_R0(traj, k));
  } else {
    ledger.set(LedgerField::E0cr, natural_energy_E0(traj, k));
  }

  const CompositePair pair = composite_energies(traj, k);
  switch (p.memory_type) {
    case MemoryType::type1:
      ledger.set(LedgerField::E1, pair.energy);
      ledger.set(LedgerField::R1, pair.damper);
      ledger.set(LedgerField::R1_printed, pair.damper_flipped);
      break;
    case MemoryType::type2:
      ledger.set(LedgerField::E2, pair.energy);
      ledger.set(LedgerField::R2, pair.damper);
      ledger.set(LedgerField::R2_flipped, pair.damper_flipped);
      break;
    case MemoryType::type3:
      if (critical) {
        ledger.set(LedgerField::E3cr, pair.energy);
        ledger.set(LedgerField::R3cr, pair.damper);
        ledger.set(LedgerField::R3cr_flipped, pair.damper_flipped);
      } else {
        ledger.set(LedgerField::E3, pair.energy);
        ledger.set(LedgerField::R3, pair.damper);
        ledger.set(LedgerField::R3_flipped, pair.damper_flipped);
      }
      break;
    case MemoryType::none:
      break;
  }
  return ledger;
}

}  // namespace mgt
