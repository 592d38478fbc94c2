#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mgt/dynamics.hpp"
#include "mgt/errors.hpp"

namespace mgt {

/// One experiment, parsed from the sectioned key=value text format.
/// Parsing is strict: every section must be present, unknown sections or
/// keys are rejected, and keys that do not apply to the chosen kind are
/// rejected too.
struct ExperimentConfig {
  struct Model {
    double tau = 1.0, alpha = 1.0, b = 1.0, c2 = 1.0;
    MemoryType memory_type = MemoryType::none;
    double lambda = 0.0;
    std::optional<double> k_override;
  };
  struct Kernel {
    KernelKind kind = KernelKind::zero;
    std::vector<double> weights;  // prony
    std::vector<double> rates;    // prony
    std::string csv;              // sampled
  };
  struct Operator {
    enum class Kind { dirichlet_1d, explicit_list };
    Kind kind = Kind::dirichlet_1d;
    double length = 0.0;      // dirichlet_1d
    std::size_t modes = 0;    // dirichlet_1d
    std::vector<double> eigenvalues;  // explicit_list
  };
  struct Initial {
    enum class Preset { first_mode_bump, random_seeded, explicit_values };
    Preset preset = Preset::first_mode_bump;
    std::uint64_t seed = 0;           // random_seeded
    std::vector<double> u0, u1, u2;   // explicit_values
  };
  struct Time {
    double t_end = 0.0;
    double h = 0.0;
    IntegrationPath path = IntegrationPath::prony_aux;
  };
  struct Analysis {
    double window_fraction = 0.5;
    bool audit = true;
    int refinement_levels = 3;
  };

  Model model;
  Kernel kernel;
  Operator op;
  Initial initial;
  Time time;
  Analysis analysis;
};

ExperimentConfig parse_experiment_config(std::string_view text);
ExperimentConfig parse_experiment_config_file(const std::string& path);

/// Inverse of parsing: serialize then re-parse yields an equal structure.
std::string serialize_config(const ExperimentConfig& cfg);

bool operator==(const ExperimentConfig::Model&, const ExperimentConfig::Model&);
bool operator==(const ExperimentConfig::Kernel&, const ExperimentConfig::Kernel&);
bool operator==(const ExperimentConfig::Operator&, const ExperimentConfig::Operator&);
bool operator==(const ExperimentConfig::Initial&, const ExperimentConfig::Initial&);
bool operator==(const ExperimentConfig::Time&, const ExperimentConfig::Time&);
bool operator==(const ExperimentConfig::Analysis&, const ExperimentConfig::Analysis&);
bool operator==(const ExperimentConfig&, const ExperimentConfig&);

// Builders from a parsed config. base_dir anchors relative CSV paths.
MgtParameters make_parameters(const ExperimentConfig& cfg);
MemoryKernel make_kernel(const ExperimentConfig& cfg, const std::string& base_dir = ".");
OperatorSpectrum make_spectrum(const ExperimentConfig& cfg);
InitialState make_initial(const ExperimentConfig& cfg, std::size_t n_modes);
TimeGrid make_grid(const ExperimentConfig& cfg);

}  // namespace mgt
