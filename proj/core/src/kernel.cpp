#include "mgt/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace mgt {

namespace {
constexpr double kGFloor = 1e-14;  // below this, g counts as zero for -g'/g
constexpr double kInf = std::numeric_limits<double>::infinity();
}  // namespace

std::string to_string(KernelKind k) {
  switch (k) {
    case KernelKind::zero: return "zero";
    case KernelKind::prony: return "prony";
    case KernelKind::sampled: return "sampled";
  }
  return "zero";
}

MemoryKernel MemoryKernel::zero() {
  MemoryKernel k;
  k.kind_ = KernelKind::zero;
  k.g_infinity_ = 0.0;
  k.c0_ = kInf;
  return k;
}

MemoryKernel MemoryKernel::prony(std::vector<double> weights, std::vector<double> rates) {
  if (weights.empty() || weights.size() != rates.size())
    throw std::invalid_argument("prony kernel needs matching nonempty weights and rates");
  for (double w : weights)
    if (!(w > 0.0) || !std::isfinite(w))
      throw std::invalid_argument("prony weights must be positive and finite");
  for (double r : rates)
    if (!(r > 0.0) || !std::isfinite(r))
      throw std::invalid_argument("prony rates must be positive and finite");
  MemoryKernel k;
  k.kind_ = KernelKind::prony;
  k.weights_ = std::move(weights);
  k.rates_ = std::move(rates);
  double g_inf = 0.0;
  double c0 = kInf;
  for (std::size_t i = 0; i < k.weights_.size(); ++i) {
    g_inf += k.weights_[i] / k.rates_[i];
    c0 = std::min(c0, k.rates_[i]);
  }
  k.g_infinity_ = g_inf;
  k.c0_ = c0;
  return k;
}

MemoryKernel MemoryKernel::from_samples(std::vector<double> t, std::vector<double> g) {
  if (t.size() < 3 || t.size() != g.size())
    throw std::invalid_argument("sampled kernel needs >= 3 matching (t, g) samples");
  if (t.front() != 0.0)
    throw std::invalid_argument("sampled kernel must start at t = 0");
  const double h = t[1] - t[0];
  if (!(h > 0.0)) throw std::invalid_argument("sample spacing must be positive");
  for (std::size_t i = 1; i < t.size(); ++i) {
    const double d = t[i] - t[i - 1];
    if (std::abs(d - h) > 1e-9 * h)
      throw std::invalid_argument("sample spacing must be uniform to relative 1e-9");
  }
  const double g0_scale = std::max(std::abs(g.front()), 1.0);
  for (double v : g)
    if (!std::isfinite(v)) throw std::invalid_argument("kernel samples must be finite");
  for (std::size_t i = 1; i < g.size(); ++i)
    if (g[i] > g[i - 1] + 1e-12 * g0_scale)
      throw std::invalid_argument("sampled kernel must be non-increasing");
  for (std::size_t i = 1; i + 1 < g.size(); ++i) {
    const double d2 = g[i + 1] - 2.0 * g[i] + g[i - 1];
    if (d2 < -1e-10 * std::abs(g.front()))
      throw std::invalid_argument("sampled kernel second differences must be >= -1e-10 g(0)");
  }

  MemoryKernel k;
  k.kind_ = KernelKind::sampled;
  k.samples_t_ = std::move(t);
  k.samples_g_ = std::move(g);
  k.sample_h_ = h;
  k.finalize_sampled();
  return k;
}

void MemoryKernel::finalize_sampled() {
  const std::size_t n = samples_g_.size();
  const double h = sample_h_;
  samples_gp_.assign(n, 0.0);
  samples_gpp_.assign(n, 0.0);
  samples_G_.assign(n, 0.0);

  // second-order differences, one-sided at the ends
  samples_gp_[0] = (-3.0 * samples_g_[0] + 4.0 * samples_g_[1] - samples_g_[2]) / (2.0 * h);
  samples_gp_[n - 1] =
      (3.0 * samples_g_[n - 1] - 4.0 * samples_g_[n - 2] + samples_g_[n - 3]) / (2.0 * h);
  for (std::size_t i = 1; i + 1 < n; ++i)
    samples_gp_[i] = (samples_g_[i + 1] - samples_g_[i - 1]) / (2.0 * h);

  samples_gpp_[0] = (samples_g_[0] - 2.0 * samples_g_[1] + samples_g_[2]) / (h * h);
  samples_gpp_[n - 1] =
      (samples_g_[n - 1] - 2.0 * samples_g_[n - 2] + samples_g_[n - 3]) / (h * h);
  for (std::size_t i = 1; i + 1 < n; ++i)
    samples_gpp_[i] = (samples_g_[i + 1] - 2.0 * samples_g_[i] + samples_g_[i - 1]) / (h * h);

  for (std::size_t i = 1; i < n; ++i)
    samples_G_[i] = samples_G_[i - 1] + 0.5 * h * (samples_g_[i - 1] + samples_g_[i]);

  // Sharpest admissible domination constant over the resolved samples.
  double c0 = kInf;
  bool any = false;
  for (std::size_t i = 0; i < n; ++i) {
    if (samples_g_[i] > kGFloor) {
      any = true;
      c0 = std::min(c0, -samples_gp_[i] / samples_g_[i]);
    }
  }
  c0_ = any ? c0 : 0.0;

  // Exponential tail fitted at the last sample; G(inf) is the trapezoid over
  // the range plus g(T)^2 / (-g'(T)), an estimate by construction.
  const double gT = samples_g_.back();
  const double gpT = samples_gp_.back();
  if (gT > kGFloor && -gpT > kGFloor) {
    tail_rate_ = -gpT / gT;
    g_infinity_ = samples_G_.back() + gT * gT / (-gpT);
  } else {
    tail_rate_ = kInf;
    g_infinity_ = samples_G_.back();
  }
}

MemoryKernel MemoryKernel::load_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open kernel CSV: " + path);
  std::string line;
  if (!std::getline(in, line))
    throw std::invalid_argument("kernel CSV is empty: " + path);
  // first line is the mandatory header
  std::vector<double> ts, gs;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::istringstream row(line);
    std::string t_str, g_str;
    if (!std::getline(row, t_str, ',') || !std::getline(row, g_str))
      throw std::invalid_argument("kernel CSV line " + std::to_string(line_no) +
                                  " is not 't,g'");
    std::size_t pos = 0;
    ts.push_back(std::stod(t_str, &pos));
    gs.push_back(std::stod(g_str, &pos));
  }
  return from_samples(std::move(ts), std::move(gs));
}

KernelPoint MemoryKernel::eval(double t) const {
  if (t < 0.0) throw std::domain_error("kernel evaluated at t < 0");
  KernelPoint p;
  switch (kind_) {
    case KernelKind::zero:
      return p;
    case KernelKind::prony: {
      for (std::size_t i = 0; i < weights_.size(); ++i) {
        const double w = weights_[i];
        const double r = rates_[i];
        const double e = std::exp(-r * t);
        p.g += w * e;
        p.g_prime -= w * r * e;
        p.g_double_prime += w * r * r * e;
        p.G += (w / r) * (1.0 - e);
      }
      return p;
    }
    case KernelKind::sampled: {
      const double T = samples_t_.back();
      if (t <= T) {
        const double pos = t / sample_h_;
        const std::size_t i0 = std::min(static_cast<std::size_t>(pos),
                                        samples_t_.size() - 2);
        const double frac = pos - static_cast<double>(i0);
        auto lerp = [&](const std::vector<double>& a) {
          return a[i0] + frac * (a[i0 + 1] - a[i0]);
        };
        p.g = lerp(samples_g_);
        p.g_prime = lerp(samples_gp_);
        p.g_double_prime = lerp(samples_gpp_);
        p.G = lerp(samples_G_);
        return p;
      }
      if (std::isinf(tail_rate_)) {
        p.G = samples_G_.back();
        return p;
      }
      const double r = tail_rate_;
      const double gT = samples_g_.back();
      const double e = std::exp(-r * (t - T));
      p.g = gT * e;
      p.g_prime = -r * p.g;
      p.g_double_prime = r * r * p.g;
      p.G = samples_G_.back() + (gT / r) * (1.0 - e);
      return p;
    }
  }
  return p;
}

std::vector<PronyTerm> MemoryKernel::prony_terms(int deriv_order) const {
  if (kind_ != KernelKind::prony)
    throw std::invalid_argument("prony_terms requires a prony kernel");
  if (deriv_order < 0 || deriv_order > 2)
    throw std::invalid_argument("deriv_order must be 0, 1 or 2");
  std::vector<PronyTerm> terms;
  terms.reserve(weights_.size());
  for (std::size_t i = 0; i < weights_.size(); ++i) {
    double w = weights_[i];
    const double r = rates_[i];
    if (deriv_order == 1) w *= -r;
    if (deriv_order == 2) w *= r * r;
    terms.push_back({w, r});
  }
  return terms;
}

MemoryKernel MemoryKernel::scaled(double factor) const {
  if (!(factor > 0.0) || !std::isfinite(factor))
    throw std::invalid_argument("kernel scale factor must be > 0");
  switch (kind_) {
    case KernelKind::zero:
      return zero();
    case KernelKind::prony: {
      std::vector<double> w = weights_;
      for (double& x : w) x *= factor;
      return prony(std::move(w), rates_);
    }
    case KernelKind::sampled: {
      std::vector<double> g = samples_g_;
      for (double& x : g) x *= factor;
      return from_samples(samples_t_, std::move(g));
    }
  }
  return zero();
}

AssumptionReport MemoryKernel::validate_assumption_A0() const {
  AssumptionReport report;
  report.id = AssumptionId::A0_kernel;
  report.witnesses["c0"] = c0_;
  report.witnesses["G_infinity"] = g_infinity_;

  switch (kind_) {
    case KernelKind::zero:
      report.witnesses["g0"] = 0.0;
      break;  // vacuous, c0 reported as the +inf sentinel
    case KernelKind::prony: {
      // All four clauses hold by structure: positive weights give g > 0,
      // g' < 0, g'' > 0, and g' + (min rate) g <= 0 termwise.
      report.witnesses["g0"] = eval(0.0).g;
      break;
    }
    case KernelKind::sampled: {
      const double g0 = samples_g_.front();
      report.witnesses["g0"] = g0;
      const double scale = std::max(std::abs(g0), 1.0);

      bool g_nonneg = true, gp_nonpos = true, gpp_nonneg = true;
      bool negative_slope_at_zero = false;
      for (std::size_t i = 0; i < samples_g_.size(); ++i) {
        if (samples_g_[i] < -1e-12 * scale) g_nonneg = false;
        if (samples_gp_[i] > 1e-10 * scale) gp_nonpos = false;
        if (samples_gpp_[i] < -1e-10 * std::abs(g0) / (sample_h_ * sample_h_))
          gpp_nonneg = false;
        if (samples_g_[i] <= kGFloor && samples_gp_[i] < -1e-10 * scale)
          negative_slope_at_zero = true;
      }
      if (!g_nonneg) report.violations.push_back("g_nonneg");
      if (!gp_nonpos) report.violations.push_back("gprime_nonpos");
      if (!gpp_nonneg) report.violations.push_back("gsecond_nonneg");
      // No positive c0 works when the infimum degenerates or when g has a
      // strictly negative slope at a zero value (the kernel is crossing
      // zero, which g >= 0 plus g' <= -c0 g forbids).
      if (!(c0_ > 0.0) || negative_slope_at_zero)
        report.violations.push_back("gprime_dominates_g");
      break;
    }
  }
  report.satisfied = report.violations.empty();
  return report;
}

double g_circ(const MemoryKernel& kernel, const std::vector<ModalVector>& history,
              double h, const OperatorSpectrum* spectrum, double t, int kernel_deriv) {
  if (t < 0.0) throw std::domain_error("g_circ evaluated at t < 0");
  if (!(h > 0.0)) throw std::invalid_argument("grid step must be > 0");
  if (kernel_deriv < 0 || kernel_deriv > 2)
    throw std::invalid_argument("kernel_deriv must be 0, 1 or 2");
  const auto idx = static_cast<std::size_t>(std::llround(t / h));
  if (std::abs(static_cast<double>(idx) * h - t) > 1e-9 * std::max(t, h))
    throw std::invalid_argument("t does not lie on the history grid");
  if (history.size() <= idx)
    throw std::invalid_argument("history does not cover [0, t]");
  const std::size_t n_modes = history[0].size();
  if (spectrum && spectrum->size() != n_modes)
    throw std::invalid_argument("history width does not match spectrum size");

  if (idx == 0 || kernel.is_zero()) return 0.0;

  const ModalVector& end = history[idx];
  double sum = 0.0;
  for (std::size_t s = 0; s <= idx; ++s) {
    const ModalVector& row = history[s];
    if (row.size() != n_modes) throw std::invalid_argument("ragged history");
    double quad = 0.0;
    for (std::size_t i = 0; i < n_modes; ++i) {
      const double d = end[i] - row[i];
      const double w = spectrum ? spectrum->eigenvalues[i] : 1.0;
      quad += w * d * d;
    }
    const KernelPoint kp = kernel.eval(t - static_cast<double>(s) * h);
    const double kv = kernel_deriv == 0 ? kp.g
                     : kernel_deriv == 1 ? kp.g_prime
                                         : kp.g_double_prime;
    const double weight = (s == 0 || s == idx) ? 0.5 : 1.0;
    sum += weight * kv * quad;
  }
  return sum * h;
}

}  // namespace mgt
