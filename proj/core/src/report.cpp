#include "mgt/report.hpp"

#include <cmath>
#include <limits>

#include "json.hpp"

namespace mgt {

namespace {

using json = nlohmann::json;

// JSON has no non-finite numbers; encode them as strings so the report
// round-trips losslessly.
json encode_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

double decode_double(const json& j) {
  if (j.is_string()) {
    const std::string s = j.get<std::string>();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
    throw std::runtime_error("unexpected string number: " + s);
  }
  return j.get<double>();
}

json assumption_to_json(const AssumptionReport& a) {
  json w = json::object();
  for (const auto& [name, value] : a.witnesses) w[name] = encode_double(value);
  return json{{"id", to_string(a.id)},
              {"satisfied", a.satisfied},
              {"witnesses", w},
              {"violations", a.violations}};
}

AssumptionReport assumption_from_json(const json& j) {
  AssumptionReport a;
  const auto id = assumption_id_from_string(j.at("id").get<std::string>());
  if (!id) throw std::runtime_error("unknown assumption id in report");
  a.id = *id;
  a.satisfied = j.at("satisfied").get<bool>();
  for (const auto& [name, value] : j.at("witnesses").items())
    a.witnesses[name] = decode_double(value);
  a.violations = j.at("violations").get<std::vector<std::string>>();
  return a;
}

}  // namespace

std::string to_json_string(const VerdictReport& r) {
  json j;
  j["meta"] = json{{"tool", r.tool},
                   {"version", r.version},
                   {"path", r.path},
                   {"memory_type", r.memory_type},
                   {"regime", r.regime},
                   {"t_end", encode_double(r.t_end)},
                   {"h", encode_double(r.h)},
                   {"n_steps", r.n_steps},
                   {"modes", r.modes},
                   {"gamma", encode_double(r.gamma_value)},
                   {"k", encode_double(r.k)},
                   {"lambda", encode_double(r.lambda)},
                   {"forced", r.forced}};

  j["assumptions"] = json::array();
  for (const auto& a : r.assumptions) j["assumptions"].push_back(assumption_to_json(a));

  j["fits"] = json::array();
  for (const auto& f : r.fits) {
    json fj{{"functional", f.functional}, {"ok", f.ok}};
    if (f.ok) {
      fj["omega"] = encode_double(f.fit.omega);
      fj["C"] = encode_double(f.fit.C);
      fj["r_squared"] = encode_double(f.fit.r_squared);
      fj["window"] = json::array({encode_double(f.fit.window_start),
                                  encode_double(f.fit.window_end)});
    } else {
      fj["error"] = f.error;
    }
    j["fits"].push_back(fj);
  }

  j["audits"] = json::array();
  for (const auto& a : r.audits)
    j["audits"].push_back(json{{"identity", a.identity},
                               {"winning_convention", a.winning_convention},
                               {"printed_residual", encode_double(a.printed_residual)},
                               {"corrected_residual", encode_double(a.corrected_residual)},
                               {"refinement_order", encode_double(a.refinement_order)}});

  j["stability"] = json::array();
  for (const auto& s : r.stability) {
    json roots = json::array();
    for (const auto& [re, im] : s.roots)
      roots.push_back(json::array({encode_double(re), encode_double(im)}));
    j["stability"].push_back(
        json{{"mu", encode_double(s.mu)},
             {"roots", roots},
             {"max_real_part", encode_double(s.max_real_part)},
             {"hurwitz", s.hurwitz},
             {"hurwitz_predicate", s.hurwitz_predicate},
             {"printed_max_real_part", encode_double(s.printed_max_real_part)}});
  }

  if (r.conservation)
    j["conservation"] = json{{"functional", r.conservation->functional},
                             {"relative_drift", encode_double(r.conservation->relative_drift)}};

  return j.dump(2) + "\n";
}

VerdictReport verdict_report_from_json(const std::string& text) {
  const json j = json::parse(text);
  VerdictReport r;
  const json& meta = j.at("meta");
  r.tool = meta.at("tool").get<std::string>();
  r.version = meta.at("version").get<std::string>();
  r.path = meta.at("path").get<std::string>();
  r.memory_type = meta.at("memory_type").get<std::string>();
  r.regime = meta.at("regime").get<std::string>();
  r.t_end = decode_double(meta.at("t_end"));
  r.h = decode_double(meta.at("h"));
  r.n_steps = meta.at("n_steps").get<std::size_t>();
  r.modes = meta.at("modes").get<std::size_t>();
  r.gamma_value = decode_double(meta.at("gamma"));
  r.k = decode_double(meta.at("k"));
  r.lambda = decode_double(meta.at("lambda"));
  r.forced = meta.at("forced").get<bool>();

  for (const auto& a : j.at("assumptions")) r.assumptions.push_back(assumption_from_json(a));

  for (const auto& fj : j.at("fits")) {
    FitReport f;
    f.functional = fj.at("functional").get<std::string>();
    f.ok = fj.at("ok").get<bool>();
    if (f.ok) {
      f.fit.omega = decode_double(fj.at("omega"));
      f.fit.C = decode_double(fj.at("C"));
      f.fit.r_squared = decode_double(fj.at("r_squared"));
      f.fit.window_start = decode_double(fj.at("window").at(0));
      f.fit.window_end = decode_double(fj.at("window").at(1));
    } else {
      f.error = fj.at("error").get<std::string>();
    }
    r.fits.push_back(f);
  }

  for (const auto& aj : j.at("audits")) {
    AuditReport a;
    a.identity = aj.at("identity").get<std::string>();
    a.winning_convention = aj.at("winning_convention").get<std::string>();
    a.printed_residual = decode_double(aj.at("printed_residual"));
    a.corrected_residual = decode_double(aj.at("corrected_residual"));
    a.refinement_order = decode_double(aj.at("refinement_order"));
    r.audits.push_back(a);
  }

  for (const auto& sj : j.at("stability")) {
    StabilityReport s;
    s.mu = decode_double(sj.at("mu"));
    for (const auto& root : sj.at("roots"))
      s.roots.emplace_back(decode_double(root.at(0)), decode_double(root.at(1)));
    s.max_real_part = decode_double(sj.at("max_real_part"));
    s.hurwitz = sj.at("hurwitz").get<bool>();
    s.hurwitz_predicate = sj.at("hurwitz_predicate").get<bool>();
    s.printed_max_real_part = decode_double(sj.at("printed_max_real_part"));
    r.stability.push_back(s);
  }

  if (j.contains("conservation")) {
    ConservationReport c;
    c.functional = j.at("conservation").at("functional").get<std::string>();
    c.relative_drift = decode_double(j.at("conservation").at("relative_drift"));
    r.conservation = c;
  }
  return r;
}

namespace {

bool double_eq(double a, double b) {
  if (std::isnan(a) && std::isnan(b)) return true;
  return a == b;
}

}  // namespace

bool operator==(const VerdictReport& a, const VerdictReport& b) {
  // structural equality via the canonical serialization
  if (a.tool != b.tool || a.version != b.version || a.path != b.path ||
      a.memory_type != b.memory_type || a.regime != b.regime) return false;
  if (!double_eq(a.t_end, b.t_end) || !double_eq(a.h, b.h) ||
      a.n_steps != b.n_steps || a.modes != b.modes) return false;
  if (!double_eq(a.gamma_value, b.gamma_value) || !double_eq(a.k, b.k) ||
      !double_eq(a.lambda, b.lambda) || a.forced != b.forced) return false;
  return to_json_string(a) == to_json_string(b);
}

}  // namespace mgt
