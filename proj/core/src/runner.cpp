#include "mgt/runner.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <set>

#include "mgt/csv.hpp"

namespace mgt {

namespace {

constexpr const char* kVersion = "0.1.0";

VerdictReport base_report(const ExperimentConfig& cfg, const MgtParameters& params,
                          const OperatorSpectrum& spectrum, const TimeGrid& grid,
                          bool forced) {
  VerdictReport r;
  r.version = kVersion;
  r.path = to_string(cfg.time.path);
  r.memory_type = to_string(params.memory_type);
  r.regime = to_string(regime(params));
  r.t_end = grid.t_end;
  r.h = grid.h;
  r.n_steps = grid.n_steps;
  r.modes = spectrum.size();
  r.gamma_value = gamma(params);
  r.k = params.k;
  r.lambda = params.lambda;
  r.forced = forced;
  for (double mu : spectrum.eigenvalues) {
    const StabilityVerdict v = characteristic_roots(params, mu);
    StabilityReport s;
    s.mu = v.mu;
    for (const auto& root : v.roots) s.roots.emplace_back(root.real(), root.imag());
    s.max_real_part = v.max_real_part;
    s.hurwitz = v.hurwitz;
    s.hurwitz_predicate = v.hurwitz_predicate;
    s.printed_max_real_part = v.printed_max_real_part;
    r.stability.push_back(s);
  }
  return r;
}

void write_report(const VerdictReport& report, const RunOptions& options,
                  RunResult& result) {
  if (!options.write_artifacts) return;
  std::filesystem::create_directories(options.out_dir);
  const auto path = std::filesystem::path(options.out_dir) / "report.json";
  std::ofstream out(path, std::ios::binary);
  const std::string text = to_json_string(report);
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  result.report_json = path.string();
}

void write_series(const Trajectory& traj, const EnergyLedger& ledger,
                  const RunOptions& options, RunResult& result) {
  if (!options.write_artifacts) return;
  std::filesystem::create_directories(options.out_dir);
  const auto fields = ledger.populated();
  std::vector<std::string> header{"t"};
  for (LedgerField f : fields) header.emplace_back(to_string(f));
  CsvWriter csv(header);
  std::vector<double> row(header.size());
  for (std::size_t n = 0; n < traj.n_points(); ++n) {
    row[0] = traj.grid().time(n);
    for (std::size_t c = 0; c < fields.size(); ++c)
      row[c + 1] = ledger.at(fields[c])[n];
    csv.add_row(row);
  }
  const auto path = std::filesystem::path(options.out_dir) / "series.csv";
  csv.write_file(path.string());
  result.series_csv = path.string();
}

std::vector<IdentityId> applicable_identities(const MgtParameters& params) {
  switch (params.memory_type) {
    case MemoryType::none:
      return {IdentityId::E0R0};
    case MemoryType::type1:
      return {IdentityId::E1R1, IdentityId::E11m_id, IdentityId::E12m_id};
    case MemoryType::type2:
      return {IdentityId::E2R2};
    case MemoryType::type3:
      return {regime(params) == Regime::critical ? IdentityId::E3crR3cr
                                                 : IdentityId::E3R3};
  }
  return {};
}

bool ledger_supports(const EnergyLedger& ledger, IdentityId id) {
  switch (id) {
    case IdentityId::E0R0:
      return (ledger.has(LedgerField::E0) || ledger.has(LedgerField::E0cr)) &&
             ledger.has(LedgerField::R0);
    case IdentityId::E1R1: return ledger.has(LedgerField::E1);
    case IdentityId::E2R2: return ledger.has(LedgerField::E2);
    case IdentityId::E3R3: return ledger.has(LedgerField::E3);
    case IdentityId::E3crR3cr: return ledger.has(LedgerField::E3cr);
    case IdentityId::E11m_id: return ledger.has(LedgerField::E11m);
    case IdentityId::E12m_id: return ledger.has(LedgerField::E12m);
  }
  return false;
}

struct FitTarget {
  LedgerField field;
  const char* name;
};

std::vector<FitTarget> fit_targets(const EnergyLedger& ledger) {
  std::vector<FitTarget> targets;
  const std::pair<LedgerField, const char*> all[] = {
      {LedgerField::F0, "F0"},   {LedgerField::F1, "F1"}, {LedgerField::F2, "F2"},
      {LedgerField::F3, "F3"},   {LedgerField::F3cr, "F3cr"},
  };
  for (const auto& [field, name] : all)
    if (ledger.has(field)) targets.push_back({field, name});
  return targets;
}

double relative_drift(const std::vector<double>& series) {
  if (series.empty() || series[0] == 0.0) return 0.0;
  double worst = 0.0;
  for (double v : series) worst = std::max(worst, std::abs(v - series[0]));
  return worst / std::abs(series[0]);
}

}  // namespace

RunResult run_experiment(const ExperimentConfig& cfg, const RunOptions& options) {
  RunResult result;

  const MgtParameters params = make_parameters(cfg);
  const MemoryKernel kernel = make_kernel(cfg, options.base_dir);
  const OperatorSpectrum spectrum = make_spectrum(cfg);
  const TimeGrid grid = make_grid(cfg);
  const InitialState initial = make_initial(cfg, spectrum.size());

  result.report = base_report(cfg, params, spectrum, grid, options.force);
  result.report.assumptions = applicable_assumptions(params, kernel);

  const bool all_ok =
      std::all_of(result.report.assumptions.begin(), result.report.assumptions.end(),
                  [](const AssumptionReport& a) { return a.satisfied; });
  if (!all_ok && !options.force) {
    result.status = RunStatus::assumption_violated;
    std::string clauses;
    for (const auto& a : result.report.assumptions)
      for (const auto& v : a.violations)
        clauses += (clauses.empty() ? "" : ", ") + to_string(a.id) + ":" + v;
    result.message = "assumptions violated: " + clauses;
    write_report(result.report, options, result);
    return result;
  }

  Trajectory traj;
  try {
    traj = simulate(params, spectrum, kernel, initial, grid, cfg.time.path);
  } catch (const NumericalFailure& e) {
    result.status = RunStatus::numerical_failure;
    result.message = e.what();
    write_report(result.report, options, result);
    return result;
  }

  const EnergyLedger ledger = evaluate_ledger(traj);

  for (const auto& target : fit_targets(ledger)) {
    FitReport fr;
    fr.functional = target.name;
    try {
      fr.fit = fit_decay_rate(ledger.at(target.field), grid,
                              cfg.analysis.window_fraction);
      fr.ok = true;
    } catch (const std::exception& e) {
      fr.ok = false;
      fr.error = e.what();
    }
    result.report.fits.push_back(fr);
  }

  if (cfg.analysis.audit) {
    for (IdentityId id : applicable_identities(params)) {
      if (!ledger_supports(ledger, id)) continue;
      AuditReport ar;
      ar.identity = std::string(to_string(id));
      if (cfg.analysis.refinement_levels >= 2) {
        const RefinedAudit refined =
            identity_audit_refined(params, spectrum, kernel, initial, grid,
                                   cfg.time.path, id, cfg.analysis.refinement_levels);
        ar.winning_convention = std::string(to_string(refined.winner));
        ar.printed_residual = refined.finest[0].max_abs_residual;
        ar.corrected_residual = refined.finest[1].max_abs_residual;
        ar.refinement_order = winning(refined.finest).refinement_order;
      } else {
        const auto results = identity_audit(traj, ledger, id);
        ar.winning_convention = std::string(to_string(winning(results).convention));
        ar.printed_residual = results[0].max_abs_residual;
        ar.corrected_residual = results[1].max_abs_residual;
        ar.refinement_order = 0.0;
      }
      result.report.audits.push_back(ar);
    }
  }

  if (regime(params) == Regime::critical && kernel.is_zero()) {
    ConservationReport c;
    if (params.memory_type == MemoryType::type3 && ledger.has(LedgerField::F3cr)) {
      c.functional = "F3cr";
      c.relative_drift = relative_drift(ledger.at(LedgerField::F3cr));
    } else {
      c.functional = "Ehat1";
      c.relative_drift = relative_drift(ledger.at(LedgerField::Ehat1));
    }
    result.report.conservation = c;
  }

  write_series(traj, ledger, options, result);
  write_report(result.report, options, result);
  result.status = RunStatus::ok;
  return result;
}

RunResult check_experiment(const ExperimentConfig& cfg, const RunOptions& options) {
  RunResult result;
  const MgtParameters params = make_parameters(cfg);
  const MemoryKernel kernel = make_kernel(cfg, options.base_dir);
  const OperatorSpectrum spectrum = make_spectrum(cfg);
  const TimeGrid grid = make_grid(cfg);

  result.report = base_report(cfg, params, spectrum, grid, options.force);
  result.report.assumptions = applicable_assumptions(params, kernel);
  const bool all_ok =
      std::all_of(result.report.assumptions.begin(), result.report.assumptions.end(),
                  [](const AssumptionReport& a) { return a.satisfied; });
  result.status = all_ok ? RunStatus::ok : RunStatus::assumption_violated;
  if (!all_ok) {
    std::string clauses;
    for (const auto& a : result.report.assumptions)
      for (const auto& v : a.violations)
        clauses += (clauses.empty() ? "" : ", ") + to_string(a.id) + ":" + v;
    result.message = "assumptions violated: " + clauses;
  }
  write_report(result.report, options, result);
  return result;
}

SweepResult sweep(const ExperimentConfig& cfg, const std::string& parameter,
                  const std::vector<double>& values, const RunOptions& options) {
  static const std::set<std::string> allowed = {"alpha", "b",  "c2",
                                                "tau",   "kernel_scale", "lambda"};
  if (!allowed.count(parameter))
    throw ConfigError("unknown sweep parameter '" + parameter + "'");
  if (values.empty()) throw ConfigError("sweep values list is empty");

  SweepResult out;
  const char* omega_cols[] = {"F0", "F1", "F2", "F3", "F3cr"};

  for (double value : values) {
    ExperimentConfig modified = cfg;
    SweepRow row;
    row.value = value;
    try {
      if (parameter == "alpha") modified.model.alpha = value;
      else if (parameter == "b") modified.model.b = value;
      else if (parameter == "c2") modified.model.c2 = value;
      else if (parameter == "tau") modified.model.tau = value;
      else if (parameter == "lambda") modified.model.lambda = value;
      else if (parameter == "kernel_scale") {
        if (modified.kernel.kind == KernelKind::prony) {
          for (double& w : modified.kernel.weights) w *= value;
          if (!(value > 0.0)) throw ConfigError("kernel_scale must be > 0");
        } else {
          throw ConfigError("kernel_scale sweep needs a prony kernel");
        }
      }

      RunOptions row_options = options;
      row_options.write_artifacts = false;
      const RunResult r = run_experiment(modified, row_options);
      row.status = r.status;
      row.gamma_value = r.report.gamma_value;
      for (const auto& fit : r.report.fits)
        if (fit.ok) row.omegas[fit.functional] = fit.fit.omega;
      for (const auto& audit : r.report.audits)
        row.max_audit_residual =
            std::max(row.max_audit_residual,
                     std::min(audit.printed_residual, audit.corrected_residual));
    } catch (const ConfigError&) {
      row.status = RunStatus::config_error;
      row.gamma_value = std::numeric_limits<double>::quiet_NaN();
    } catch (const std::invalid_argument&) {
      row.status = RunStatus::config_error;
      row.gamma_value = std::numeric_limits<double>::quiet_NaN();
    }
    out.rows.push_back(std::move(row));
  }

  if (options.write_artifacts) {
    std::filesystem::create_directories(options.out_dir);
    std::vector<std::string> header{"value", "gamma"};
    for (const char* name : omega_cols) header.push_back(std::string("omega_") + name);
    header.emplace_back("max_audit_residual");
    header.emplace_back("status");
    CsvWriter csv(header);
    for (const auto& row : out.rows) {
      std::vector<std::string> cells;
      cells.push_back(format_double(row.value));
      cells.push_back(std::isnan(row.gamma_value) ? "" : format_double(row.gamma_value));
      for (const char* name : omega_cols) {
        const auto it = row.omegas.find(name);
        cells.push_back(it == row.omegas.end() ? "" : format_double(it->second));
      }
      cells.push_back(format_double(row.max_audit_residual));
      switch (row.status) {
        case RunStatus::ok: cells.emplace_back("ok"); break;
        case RunStatus::config_error: cells.emplace_back("config_error"); break;
        case RunStatus::assumption_violated: cells.emplace_back("assumption_violated"); break;
        case RunStatus::numerical_failure: cells.emplace_back("numerical_failure"); break;
      }
      csv.add_row_mixed(cells);
    }
    const auto path = std::filesystem::path(options.out_dir) / "sweep.csv";
    csv.write_file(path.string());
    out.csv_path = path.string();
  }
  return out;
}

StabilityMapResult stability_map(const ExperimentConfig& cfg,
                                 const std::vector<double>& mu_override,
                                 const RunOptions& options) {
  const MgtParameters params = make_parameters(cfg);
  std::vector<double> mus = mu_override;
  if (mus.empty()) mus = make_spectrum(cfg).eigenvalues;
  if (mus.empty()) throw ConfigError("stability map needs a nonempty mu grid");
  for (double mu : mus)
    if (!(mu > 0.0) || !std::isfinite(mu))
      throw ConfigError("stability map mu values must be positive");

  StabilityMapResult out;
  out.gamma_value = gamma(params);
  for (double mu : mus) {
    const StabilityVerdict v = characteristic_roots(params, mu);
    StabilityReport s;
    s.mu = v.mu;
    for (const auto& root : v.roots) s.roots.emplace_back(root.real(), root.imag());
    s.max_real_part = v.max_real_part;
    s.hurwitz = v.hurwitz;
    s.hurwitz_predicate = v.hurwitz_predicate;
    s.printed_max_real_part = v.printed_max_real_part;
    out.rows.push_back(s);
  }

  if (options.write_artifacts) {
    std::filesystem::create_directories(options.out_dir);
    CsvWriter csv({"tau", "alpha", "b", "c2", "gamma", "mu", "re1", "im1", "re2",
                   "im2", "re3", "im3", "max_real_part", "hurwitz",
                   "hurwitz_predicate", "printed_max_real_part"});
    for (const auto& s : out.rows) {
      std::vector<std::string> cells = {
          format_double(params.tau),  format_double(params.alpha),
          format_double(params.b),    format_double(params.c2),
          format_double(out.gamma_value), format_double(s.mu)};
      for (const auto& [re, im] : s.roots) {
        cells.push_back(format_double(re));
        cells.push_back(format_double(im));
      }
      cells.push_back(format_double(s.max_real_part));
      cells.emplace_back(s.hurwitz ? "true" : "false");
      cells.emplace_back(s.hurwitz_predicate ? "true" : "false");
      cells.push_back(format_double(s.printed_max_real_part));
      csv.add_row_mixed(cells);
    }
    const auto path = std::filesystem::path(options.out_dir) / "stability_map.csv";
    csv.write_file(path.string());
    out.csv_path = path.string();
  }
  return out;
}

}  // namespace mgt
