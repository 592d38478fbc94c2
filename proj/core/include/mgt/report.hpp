#pragma once

#include <optional>
#include <string>
#include <vector>

#include "mgt/analysis.hpp"
#include "mgt/config.hpp"

namespace mgt {

struct FitReport {
  std::string functional;
  bool ok = false;
  DecayFit fit;
  std::string error;  // set when ok == false
};

struct AuditReport {
  std::string identity;
  std::string winning_convention;
  double printed_residual = 0.0;
  double corrected_residual = 0.0;
  double refinement_order = 0.0;
};

struct StabilityReport {
  double mu = 0.0;
  std::vector<std::pair<double, double>> roots;  // (re, im), sorted
  double max_real_part = 0.0;
  bool hurwitz = false;
  bool hurwitz_predicate = false;
  double printed_max_real_part = 0.0;
};

struct ConservationReport {
  std::string functional;
  double relative_drift = 0.0;
};

/// Machine-readable run verdict; serializes to JSON and re-parses
/// losslessly (non-finite values are encoded as strings).
struct VerdictReport {
  std::string tool = "mgtlab";
  std::string version;
  std::string path;
  std::string memory_type;
  std::string regime;
  double t_end = 0.0;
  double h = 0.0;
  std::size_t n_steps = 0;
  std::size_t modes = 0;
  double gamma_value = 0.0;
  double k = 0.0;
  double lambda = 0.0;
  bool forced = false;

  std::vector<AssumptionReport> assumptions;
  std::vector<FitReport> fits;
  std::vector<AuditReport> audits;
  std::vector<StabilityReport> stability;
  std::optional<ConservationReport> conservation;
};

std::string to_json_string(const VerdictReport& report);
VerdictReport verdict_report_from_json(const std::string& text);

bool operator==(const VerdictReport& a, const VerdictReport& b);

}  // namespace mgt
