// Batch front door: run experiments from sectioned key=value configs, sweep
// one parameter, map characteristic-root stability, or check assumptions
// only. Outputs land in --out (default ./out) as CSV series and a JSON
// verdict report.

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "mgt/runner.hpp"

namespace {

std::vector<double> parse_value_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    if (item.empty()) continue;
    std::size_t pos = 0;
    out.push_back(std::stod(item, &pos));
    if (pos != item.size()) throw mgt::ConfigError("malformed value list entry: " + item);
  }
  return out;
}

int status_code(mgt::RunStatus status) { return static_cast<int>(status); }

mgt::ExperimentConfig load(const std::string& config_path) {
  return mgt::parse_experiment_config_file(config_path);
}

std::string config_dir(const std::string& config_path) {
  const auto parent = std::filesystem::path(config_path).parent_path();
  return parent.empty() ? "." : parent.string();
}

void print_summary(const mgt::RunResult& result) {
  const auto& r = result.report;
  std::cout << "memory_type=" << r.memory_type << " regime=" << r.regime
            << " gamma=" << r.gamma_value << " k=" << r.k << "\n";
  for (const auto& a : r.assumptions) {
    std::cout << "assumption " << mgt::to_string(a.id) << ": "
              << (a.satisfied ? "satisfied" : "violated");
    for (const auto& v : a.violations) std::cout << " " << v;
    std::cout << "\n";
  }
  for (const auto& f : r.fits) {
    if (f.ok)
      std::cout << "fit " << f.functional << ": omega=" << f.fit.omega
                << " r2=" << f.fit.r_squared << "\n";
    else
      std::cout << "fit " << f.functional << ": " << f.error << "\n";
  }
  for (const auto& a : r.audits)
    std::cout << "audit " << a.identity << ": winner=" << a.winning_convention
              << " residual="
              << std::min(a.printed_residual, a.corrected_residual)
              << " order=" << a.refinement_order << "\n";
  if (r.conservation)
    std::cout << "conservation " << r.conservation->functional
              << ": drift=" << r.conservation->relative_drift << "\n";
  if (!result.message.empty()) std::cout << result.message << "\n";
  if (!result.series_csv.empty()) std::cout << "wrote " << result.series_csv << "\n";
  if (!result.report_json.empty()) std::cout << "wrote " << result.report_json << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Spectral simulation and verification lab for the MGT equation with memory"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir = "out";
  bool force = false;

  auto* run_cmd = app.add_subcommand("run", "Run one experiment");
  run_cmd->add_option("config", config_path, "experiment config")->required();
  run_cmd->add_option("--out", out_dir, "output directory");
  run_cmd->add_flag("--force", force, "run even when assumptions are violated");

  std::string sweep_param;
  std::string sweep_values;
  auto* sweep_cmd = app.add_subcommand("sweep", "Rerun while varying one parameter");
  sweep_cmd->add_option("config", config_path, "experiment config")->required();
  sweep_cmd->add_option("--param", sweep_param, "alpha|b|c2|tau|kernel_scale|lambda")
      ->required();
  sweep_cmd->add_option("--values", sweep_values, "comma-separated values")->required();
  sweep_cmd->add_option("--out", out_dir, "output directory");
  sweep_cmd->add_flag("--force", force, "run rows even when assumptions are violated");

  std::string mu_list;
  auto* map_cmd = app.add_subcommand("stability-map", "Characteristic roots per mode");
  map_cmd->add_option("config", config_path, "experiment config")->required();
  map_cmd->add_option("--mu", mu_list, "comma-separated mu grid (default: operator spectrum)");
  map_cmd->add_option("--out", out_dir, "output directory");

  auto* check_cmd = app.add_subcommand("check", "Check assumptions only");
  check_cmd->add_option("config", config_path, "experiment config")->required();
  check_cmd->add_option("--out", out_dir, "output directory");

  CLI11_PARSE(app, argc, argv);

  try {
    mgt::RunOptions options;
    options.force = force;
    options.out_dir = out_dir;
    options.base_dir = config_dir(config_path);

    if (run_cmd->parsed()) {
      const auto result = mgt::run_experiment(load(config_path), options);
      print_summary(result);
      return status_code(result.status);
    }
    if (sweep_cmd->parsed()) {
      const auto values = parse_value_list(sweep_values);
      const auto result = mgt::sweep(load(config_path), sweep_param, values, options);
      for (const auto& row : result.rows)
        std::cout << "value=" << row.value << " gamma=" << row.gamma_value
                  << " status=" << static_cast<int>(row.status) << "\n";
      if (!result.csv_path.empty()) std::cout << "wrote " << result.csv_path << "\n";
      return 0;
    }
    if (map_cmd->parsed()) {
      std::vector<double> mus;
      if (!map_cmd->get_option("--mu")->empty()) {
        mus = parse_value_list(mu_list);
        if (mus.empty()) throw mgt::ConfigError("mu list is empty");
      }
      const auto result = mgt::stability_map(load(config_path), mus, options);
      for (const auto& row : result.rows)
        std::cout << "mu=" << row.mu << " max_real_part=" << row.max_real_part
                  << " hurwitz=" << (row.hurwitz ? "true" : "false") << "\n";
      if (!result.csv_path.empty()) std::cout << "wrote " << result.csv_path << "\n";
      return 0;
    }
    if (check_cmd->parsed()) {
      const auto result = mgt::check_experiment(load(config_path), options);
      print_summary(result);
      return status_code(result.status);
    }
  } catch (const mgt::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const mgt::NumericalFailure& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 4;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
