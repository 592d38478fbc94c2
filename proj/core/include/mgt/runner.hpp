#pragma once

#include <map>
#include <string>
#include <vector>

#include "mgt/config.hpp"
#include "mgt/report.hpp"

namespace mgt {

enum class RunStatus {
  ok = 0,
  config_error = 2,
  assumption_violated = 3,
  numerical_failure = 4,
};

struct RunOptions {
  bool force = false;        ///< run even when assumptions are violated
  std::string out_dir = "out";
  std::string base_dir = ".";  ///< anchors relative paths in the config
  bool write_artifacts = true;
};

struct RunResult {
  RunStatus status = RunStatus::ok;
  VerdictReport report;
  std::string message;          // failure detail, if any
  std::string series_csv;       // written file path (empty if skipped)
  std::string report_json;      // written file path
};

/// Full pipeline: assumption gate, simulate, ledger, fits, audits,
/// stability, conservation; writes series.csv and report.json into
/// out_dir. Assumption violations stop before simulating unless forced
/// (the report still records the violated clauses either way).
RunResult run_experiment(const ExperimentConfig& cfg, const RunOptions& options);

/// Assumption checks only; report.json is written, nothing is simulated.
RunResult check_experiment(const ExperimentConfig& cfg, const RunOptions& options);

struct SweepRow {
  double value = 0.0;
  double gamma_value = 0.0;
  std::map<std::string, double> omegas;  // per fitted functional
  double max_audit_residual = 0.0;
  RunStatus status = RunStatus::ok;
};

struct SweepResult {
  std::vector<SweepRow> rows;
  std::string csv_path;
};

/// Reruns the experiment once per value of one parameter
/// (alpha | b | c2 | tau | kernel_scale | lambda); failed rows are
/// recorded and the sweep continues. Empty value lists and unknown
/// parameter names are config errors.
SweepResult sweep(const ExperimentConfig& cfg, const std::string& parameter,
                  const std::vector<double>& values, const RunOptions& options);

struct StabilityMapResult {
  std::vector<StabilityReport> rows;
  double gamma_value = 0.0;
  std::string csv_path;
};

/// One row per eigenvalue of the config's operator (or an explicit mu
/// list): roots, max real part, both verdicts. Empty mu grids are config
/// errors.
StabilityMapResult stability_map(const ExperimentConfig& cfg,
                                 const std::vector<double>& mu_override,
                                 const RunOptions& options);

}  // namespace mgt
