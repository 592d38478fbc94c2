#include "mgt/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <random>
#include <set>
#include <sstream>

#include "mgt/csv.hpp"

namespace mgt {

namespace {

std::string trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

// section -> key -> value, strict: no duplicate keys, no stray text
using Sections = std::map<std::string, std::map<std::string, std::string>>;

Sections parse_sections(std::string_view text) {
  Sections sections;
  std::string current;
  std::size_t line_no = 0;
  std::istringstream in{std::string(text)};
  std::string raw;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string line = trim(raw);
    if (line.empty() || line[0] == '#' || line[0] == ';') continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw ConfigError("line " + std::to_string(line_no) + ": malformed section header");
      current = trim(std::string_view(line).substr(1, line.size() - 2));
      if (current.empty())
        throw ConfigError("line " + std::to_string(line_no) + ": empty section name");
      if (sections.count(current))
        throw ConfigError("duplicate section [" + current + "]");
      sections[current];
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("line " + std::to_string(line_no) + ": expected key = value");
    if (current.empty())
      throw ConfigError("line " + std::to_string(line_no) + ": key outside any section");
    const std::string key = trim(std::string_view(line).substr(0, eq));
    const std::string value = trim(std::string_view(line).substr(eq + 1));
    if (key.empty())
      throw ConfigError("line " + std::to_string(line_no) + ": empty key");
    auto [it, inserted] = sections[current].emplace(key, value);
    if (!inserted)
      throw ConfigError("duplicate key '" + key + "' in section [" + current + "]");
  }
  return sections;
}

class SectionReader {
 public:
  SectionReader(const Sections& sections, const std::string& name) : name_(name) {
    const auto it = sections.find(name);
    if (it == sections.end()) throw ConfigError("missing section [" + name + "]");
    entries_ = &it->second;
  }

  bool has(const std::string& key) const {
    used_.insert(key);
    return entries_->count(key) > 0;
  }

  std::string get(const std::string& key) const {
    used_.insert(key);
    const auto it = entries_->find(key);
    if (it == entries_->end())
      throw ConfigError("missing key '" + key + "' in section [" + name_ + "]");
    if (it->second.empty())
      throw ConfigError("empty value for key '" + key + "' in section [" + name_ + "]");
    return it->second;
  }

  double get_double(const std::string& key) const {
    const std::string v = get(key);
    try {
      return parse_double(v);
    } catch (const std::exception&) {
      throw ConfigError("key '" + key + "' in section [" + name_ +
                        "] is not a number: '" + v + "'");
    }
  }

  std::uint64_t get_uint(const std::string& key) const {
    const std::string v = get(key);
    std::uint64_t out = 0;
    const auto res = std::from_chars(v.data(), v.data() + v.size(), out);
    if (res.ec != std::errc() || res.ptr != v.data() + v.size())
      throw ConfigError("key '" + key + "' in section [" + name_ +
                        "] is not a nonnegative integer: '" + v + "'");
    return out;
  }

  std::vector<double> get_list(const std::string& key) const {
    const std::string v = get(key);
    std::vector<double> out;
    std::istringstream in(v);
    std::string item;
    while (std::getline(in, item, ',')) {
      const std::string t = trim(item);
      if (t.empty())
        throw ConfigError("empty entry in list key '" + key + "' in section [" +
                          name_ + "]");
      try {
        out.push_back(parse_double(t));
      } catch (const std::exception&) {
        throw ConfigError("list key '" + key + "' in section [" + name_ +
                          "] has a non-number entry: '" + t + "'");
      }
    }
    if (out.empty())
      throw ConfigError("list key '" + key + "' in section [" + name_ + "] is empty");
    return out;
  }

  void reject_unknown() const {
    for (const auto& [key, value] : *entries_)
      if (!used_.count(key))
        throw ConfigError("unknown key '" + key + "' in section [" + name_ + "]");
  }

  void forbid(const std::string& key, const std::string& reason) const {
    used_.insert(key);
    if (entries_->count(key))
      throw ConfigError("key '" + key + "' in section [" + name_ + "] " + reason);
  }

 private:
  std::string name_;
  const std::map<std::string, std::string>* entries_;
  mutable std::set<std::string> used_;
};

}  // namespace

ExperimentConfig parse_experiment_config(std::string_view text) {
  const Sections sections = parse_sections(text);
  static const std::set<std::string> known = {"model",   "kernel", "operator",
                                              "initial", "time",   "analysis"};
  for (const auto& [name, entries] : sections)
    if (!known.count(name)) throw ConfigError("unknown section [" + name + "]");

  ExperimentConfig cfg;

  {
    SectionReader s(sections, "model");
    cfg.model.tau = s.get_double("tau");
    cfg.model.alpha = s.get_double("alpha");
    cfg.model.b = s.get_double("b");
    cfg.model.c2 = s.get_double("c2");
    const std::string type = s.get("memory_type");
    if (type == "none") cfg.model.memory_type = MemoryType::none;
    else if (type == "type1") cfg.model.memory_type = MemoryType::type1;
    else if (type == "type2") cfg.model.memory_type = MemoryType::type2;
    else if (type == "type3") cfg.model.memory_type = MemoryType::type3;
    else throw ConfigError("key 'memory_type' must be none|type1|type2|type3, got '" + type + "'");
    cfg.model.lambda = s.get_double("lambda");
    if (s.has("k_override")) cfg.model.k_override = s.get_double("k_override");
    s.reject_unknown();
  }

  {
    SectionReader s(sections, "kernel");
    const std::string kind = s.get("kind");
    if (kind == "zero") {
      cfg.kernel.kind = KernelKind::zero;
      s.forbid("weights", "does not apply to kind=zero");
      s.forbid("rates", "does not apply to kind=zero");
      s.forbid("csv", "does not apply to kind=zero");
    } else if (kind == "prony") {
      cfg.kernel.kind = KernelKind::prony;
      cfg.kernel.weights = s.get_list("weights");
      cfg.kernel.rates = s.get_list("rates");
      s.forbid("csv", "does not apply to kind=prony");
    } else if (kind == "sampled") {
      cfg.kernel.kind = KernelKind::sampled;
      cfg.kernel.csv = s.get("csv");
      s.forbid("weights", "does not apply to kind=sampled");
      s.forbid("rates", "does not apply to kind=sampled");
    } else {
      throw ConfigError("key 'kind' in section [kernel] must be zero|prony|sampled, got '" +
                        kind + "'");
    }
    s.reject_unknown();
  }

  {
    SectionReader s(sections, "operator");
    const std::string kind = s.get("kind");
    if (kind == "dirichlet_1d") {
      cfg.op.kind = ExperimentConfig::Operator::Kind::dirichlet_1d;
      cfg.op.length = s.get_double("length");
      cfg.op.modes = static_cast<std::size_t>(s.get_uint("modes"));
      s.forbid("eigenvalues", "does not apply to kind=dirichlet_1d");
    } else if (kind == "explicit") {
      cfg.op.kind = ExperimentConfig::Operator::Kind::explicit_list;
      cfg.op.eigenvalues = s.get_list("eigenvalues");
      s.forbid("length", "does not apply to kind=explicit");
      s.forbid("modes", "does not apply to kind=explicit");
    } else {
      throw ConfigError("key 'kind' in section [operator] must be dirichlet_1d|explicit, got '" +
                        kind + "'");
    }
    s.reject_unknown();
  }

  {
    SectionReader s(sections, "initial");
    const std::string preset = s.get("preset");
    if (preset == "first_mode_bump") {
      cfg.initial.preset = ExperimentConfig::Initial::Preset::first_mode_bump;
      s.forbid("seed", "does not apply to preset=first_mode_bump");
      s.forbid("u0", "does not apply to preset=first_mode_bump");
      s.forbid("u1", "does not apply to preset=first_mode_bump");
      s.forbid("u2", "does not apply to preset=first_mode_bump");
    } else if (preset == "random_seeded") {
      cfg.initial.preset = ExperimentConfig::Initial::Preset::random_seeded;
      cfg.initial.seed = s.get_uint("seed");
      s.forbid("u0", "does not apply to preset=random_seeded");
      s.forbid("u1", "does not apply to preset=random_seeded");
      s.forbid("u2", "does not apply to preset=random_seeded");
    } else if (preset == "explicit") {
      cfg.initial.preset = ExperimentConfig::Initial::Preset::explicit_values;
      cfg.initial.u0 = s.get_list("u0");
      cfg.initial.u1 = s.get_list("u1");
      cfg.initial.u2 = s.get_list("u2");
      s.forbid("seed", "does not apply to preset=explicit");
    } else {
      throw ConfigError(
          "key 'preset' in section [initial] must be first_mode_bump|random_seeded|explicit, got '" +
          preset + "'");
    }
    s.reject_unknown();
  }

  {
    SectionReader s(sections, "time");
    cfg.time.t_end = s.get_double("t_end");
    cfg.time.h = s.get_double("h");
    const std::string path = s.get("path");
    if (path == "prony_aux") cfg.time.path = IntegrationPath::prony_aux;
    else if (path == "quadrature") cfg.time.path = IntegrationPath::quadrature;
    else throw ConfigError("key 'path' in section [time] must be prony_aux|quadrature, got '" +
                           path + "'");
    s.reject_unknown();
  }

  {
    SectionReader s(sections, "analysis");
    cfg.analysis.window_fraction = s.get_double("window_fraction");
    const std::string audit = s.get("audit");
    if (audit == "on") cfg.analysis.audit = true;
    else if (audit == "off") cfg.analysis.audit = false;
    else throw ConfigError("key 'audit' in section [analysis] must be on|off, got '" + audit + "'");
    cfg.analysis.refinement_levels = static_cast<int>(s.get_uint("refinement_levels"));
    if (cfg.analysis.refinement_levels < 1 || cfg.analysis.refinement_levels > 6)
      throw ConfigError("key 'refinement_levels' in section [analysis] must be in [1, 6]");
    if (!(cfg.analysis.window_fraction > 0.0) || !(cfg.analysis.window_fraction < 1.0))
      throw ConfigError("key 'window_fraction' in section [analysis] must lie in (0, 1)");
    s.reject_unknown();
  }

  return cfg;
}

ExperimentConfig parse_experiment_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config: " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_experiment_config(buf.str());
}

namespace {

std::string join_list(const std::vector<double>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ',';
    out += format_double(v[i]);
  }
  return out;
}

}  // namespace

std::string serialize_config(const ExperimentConfig& cfg) {
  std::string out;
  out += "[model]\n";
  out += "tau = " + format_double(cfg.model.tau) + "\n";
  out += "alpha = " + format_double(cfg.model.alpha) + "\n";
  out += "b = " + format_double(cfg.model.b) + "\n";
  out += "c2 = " + format_double(cfg.model.c2) + "\n";
  out += "memory_type = " + to_string(cfg.model.memory_type) + "\n";
  out += "lambda = " + format_double(cfg.model.lambda) + "\n";
  if (cfg.model.k_override)
    out += "k_override = " + format_double(*cfg.model.k_override) + "\n";

  out += "[kernel]\n";
  out += "kind = " + to_string(cfg.kernel.kind) + "\n";
  if (cfg.kernel.kind == KernelKind::prony) {
    out += "weights = " + join_list(cfg.kernel.weights) + "\n";
    out += "rates = " + join_list(cfg.kernel.rates) + "\n";
  } else if (cfg.kernel.kind == KernelKind::sampled) {
    out += "csv = " + cfg.kernel.csv + "\n";
  }

  out += "[operator]\n";
  if (cfg.op.kind == ExperimentConfig::Operator::Kind::dirichlet_1d) {
    out += "kind = dirichlet_1d\n";
    out += "length = " + format_double(cfg.op.length) + "\n";
    out += "modes = " + std::to_string(cfg.op.modes) + "\n";
  } else {
    out += "kind = explicit\n";
    out += "eigenvalues = " + join_list(cfg.op.eigenvalues) + "\n";
  }

  out += "[initial]\n";
  switch (cfg.initial.preset) {
    case ExperimentConfig::Initial::Preset::first_mode_bump:
      out += "preset = first_mode_bump\n";
      break;
    case ExperimentConfig::Initial::Preset::random_seeded:
      out += "preset = random_seeded\n";
      out += "seed = " + std::to_string(cfg.initial.seed) + "\n";
      break;
    case ExperimentConfig::Initial::Preset::explicit_values:
      out += "preset = explicit\n";
      out += "u0 = " + join_list(cfg.initial.u0) + "\n";
      out += "u1 = " + join_list(cfg.initial.u1) + "\n";
      out += "u2 = " + join_list(cfg.initial.u2) + "\n";
      break;
  }

  out += "[time]\n";
  out += "t_end = " + format_double(cfg.time.t_end) + "\n";
  out += "h = " + format_double(cfg.time.h) + "\n";
  out += "path = " + to_string(cfg.time.path) + "\n";

  out += "[analysis]\n";
  out += "window_fraction = " + format_double(cfg.analysis.window_fraction) + "\n";
  out += std::string("audit = ") + (cfg.analysis.audit ? "on" : "off") + "\n";
  out += "refinement_levels = " + std::to_string(cfg.analysis.refinement_levels) + "\n";
  return out;
}

bool operator==(const ExperimentConfig::Model& a, const ExperimentConfig::Model& b) {
  return a.tau == b.tau && a.alpha == b.alpha && a.b == b.b && a.c2 == b.c2 &&
         a.memory_type == b.memory_type && a.lambda == b.lambda &&
         a.k_override == b.k_override;
}
bool operator==(const ExperimentConfig::Kernel& a, const ExperimentConfig::Kernel& b) {
  return a.kind == b.kind && a.weights == b.weights && a.rates == b.rates &&
         a.csv == b.csv;
}
bool operator==(const ExperimentConfig::Operator& a, const ExperimentConfig::Operator& b) {
  return a.kind == b.kind && a.length == b.length && a.modes == b.modes &&
         a.eigenvalues == b.eigenvalues;
}
bool operator==(const ExperimentConfig::Initial& a, const ExperimentConfig::Initial& b) {
  return a.preset == b.preset && a.seed == b.seed && a.u0 == b.u0 && a.u1 == b.u1 &&
         a.u2 == b.u2;
}
bool operator==(const ExperimentConfig::Time& a, const ExperimentConfig::Time& b) {
  return a.t_end == b.t_end && a.h == b.h && a.path == b.path;
}
bool operator==(const ExperimentConfig::Analysis& a, const ExperimentConfig::Analysis& b) {
  return a.window_fraction == b.window_fraction && a.audit == b.audit &&
         a.refinement_levels == b.refinement_levels;
}
bool operator==(const ExperimentConfig& a, const ExperimentConfig& b) {
  return a.model == b.model && a.kernel == b.kernel && a.op == b.op &&
         a.initial == b.initial && a.time == b.time && a.analysis == b.analysis;
}

MgtParameters make_parameters(const ExperimentConfig& cfg) {
  try {
    return MgtParameters::create(cfg.model.tau, cfg.model.alpha, cfg.model.b,
                                 cfg.model.c2, cfg.model.memory_type,
                                 cfg.model.lambda, cfg.model.k_override);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("section [model]: ") + e.what());
  }
}

MemoryKernel make_kernel(const ExperimentConfig& cfg, const std::string& base_dir) {
  try {
    switch (cfg.kernel.kind) {
      case KernelKind::zero:
        return MemoryKernel::zero();
      case KernelKind::prony:
        return MemoryKernel::prony(cfg.kernel.weights, cfg.kernel.rates);
      case KernelKind::sampled: {
        std::filesystem::path p(cfg.kernel.csv);
        if (p.is_relative()) p = std::filesystem::path(base_dir) / p;
        return MemoryKernel::load_csv(p.string());
      }
    }
  } catch (const std::exception& e) {
    throw ConfigError(std::string("section [kernel]: ") + e.what());
  }
  return MemoryKernel::zero();
}

OperatorSpectrum make_spectrum(const ExperimentConfig& cfg) {
  try {
    if (cfg.op.kind == ExperimentConfig::Operator::Kind::dirichlet_1d)
      return OperatorSpectrum::dirichlet_1d(cfg.op.length, cfg.op.modes);
    return OperatorSpectrum::from_eigenvalues(cfg.op.eigenvalues);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("section [operator]: ") + e.what());
  }
}

namespace {

// engine-stable uniform in [-1, 1): identical across platforms, unlike the
// distribution adapters
double portable_uniform(std::uint64_t raw) {
  return 2.0 * (static_cast<double>(raw >> 11) * 0x1.0p-53) - 1.0;
}

}  // namespace

InitialState make_initial(const ExperimentConfig& cfg, std::size_t n_modes) {
  InitialState init;
  switch (cfg.initial.preset) {
    case ExperimentConfig::Initial::Preset::first_mode_bump:
      init.u0.assign(n_modes, 0.0);
      init.u1.assign(n_modes, 0.0);
      init.u2.assign(n_modes, 0.0);
      init.u0[0] = 1.0;
      return init;
    case ExperimentConfig::Initial::Preset::random_seeded: {
      std::mt19937_64 rng(cfg.initial.seed);
      init.u0.resize(n_modes);
      init.u1.resize(n_modes);
      init.u2.resize(n_modes);
      for (std::size_t i = 0; i < n_modes; ++i) {
        init.u0[i] = portable_uniform(rng());
        init.u1[i] = portable_uniform(rng());
        init.u2[i] = portable_uniform(rng());
      }
      return init;
    }
    case ExperimentConfig::Initial::Preset::explicit_values:
      if (cfg.initial.u0.size() != n_modes || cfg.initial.u1.size() != n_modes ||
          cfg.initial.u2.size() != n_modes)
        throw ConfigError("section [initial]: u0/u1/u2 must each list one value per mode");
      init.u0 = cfg.initial.u0;
      init.u1 = cfg.initial.u1;
      init.u2 = cfg.initial.u2;
      return init;
  }
  return init;
}

TimeGrid make_grid(const ExperimentConfig& cfg) {
  try {
    return TimeGrid::create(cfg.time.t_end, cfg.time.h);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("section [time]: ") + e.what());
  }
}

}  // namespace mgt
