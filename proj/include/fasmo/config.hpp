#pragma once

#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

#include "fasmo/presets.hpp"
#include "fasmo/simulate.hpp"

namespace fasmo {

using nlohmann::json;

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct OutputOptions {
  bool plot = false;
  std::vector<int> channels;  // 1-based; empty means all
};

/// On-disk run description: a fully validated Scenario plus output options.
/// `normalized` keeps the expanded scenario JSON for compatibility checks
/// between runs that are meant to share a plant.
struct RunConfig {
  std::string name;
  Scenario scenario;
  OutputOptions output;
  json normalized;
};

namespace cfg_detail {

[[noreturn]] inline void fail(const std::string& path, const std::string& message) {
  throw ConfigError(path + ": " + message);
}

inline void require_keys(const json& j, const std::string& path,
                         std::initializer_list<const char*> allowed) {
  if (!j.is_object()) fail(path, "expected an object");
  for (const auto& [key, value] : j.items()) {
    bool ok = false;
    for (const char* a : allowed) {
      if (key == a) {
        ok = true;
        break;
      }
    }
    if (!ok) fail(path, "unknown key '" + key + "'");
  }
}

inline const json& require(const json& j, const std::string& path, const char* key) {
  const auto it = j.find(key);
  if (it == j.end()) fail(path, "missing required key '" + std::string(key) + "'");
  return *it;
}

inline double as_number(const json& j, const std::string& path) {
  if (!j.is_number()) fail(path, "expected a number");
  return j.get<double>();
}

inline int as_int(const json& j, const std::string& path) {
  if (!j.is_number_integer()) fail(path, "expected an integer");
  return j.get<int>();
}

inline bool as_bool(const json& j, const std::string& path) {
  if (!j.is_boolean()) fail(path, "expected a boolean");
  return j.get<bool>();
}

inline std::string as_string(const json& j, const std::string& path) {
  if (!j.is_string()) fail(path, "expected a string");
  return j.get<std::string>();
}

inline std::vector<double> as_number_array(const json& j, const std::string& path) {
  if (!j.is_array()) fail(path, "expected an array of numbers");
  std::vector<double> out;
  out.reserve(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) {
    out.push_back(as_number(j[i], path + "[" + std::to_string(i) + "]"));
  }
  return out;
}

inline Signal parse_signal(const json& j, const std::string& path) {
  require_keys(j, path, {"kind", "value", "amplitude", "omega", "phase"});
  const std::string kind = as_string(require(j, path, "kind"), path + ".kind");
  if (kind == "zero") {
    require_keys(j, path, {"kind"});
    return Signal::zero();
  }
  if (kind == "constant") {
    require_keys(j, path, {"kind", "value"});
    return Signal::constant(as_number(require(j, path, "value"), path + ".value"));
  }
  if (kind == "sine") {
    require_keys(j, path, {"kind", "amplitude", "omega", "phase"});
    const double amplitude = as_number(require(j, path, "amplitude"), path + ".amplitude");
    const double omega = as_number(require(j, path, "omega"), path + ".omega");
    double phase = 0.0;
    if (j.contains("phase")) phase = as_number(j["phase"], path + ".phase");
    return Signal::sine(amplitude, omega, phase);
  }
  fail(path + ".kind", "unknown signal kind '" + kind + "' (expected zero, constant or sine)");
}

inline std::vector<PolyTerm> parse_terms(const json& j, const std::string& path) {
  if (!j.is_array()) fail(path, "expected an array of polynomial terms");
  std::vector<PolyTerm> terms;
  for (std::size_t i = 0; i < j.size(); ++i) {
    const std::string tp = path + "[" + std::to_string(i) + "]";
    require_keys(j[i], tp, {"coef", "powers"});
    PolyTerm term;
    term.coef = as_number(require(j[i], tp, "coef"), tp + ".coef");
    const json& powers = require(j[i], tp, "powers");
    if (!powers.is_array()) fail(tp + ".powers", "expected an array of integers");
    for (std::size_t p = 0; p < powers.size(); ++p) {
      term.powers.push_back(as_int(powers[p], tp + ".powers[" + std::to_string(p) + "]"));
    }
    terms.push_back(std::move(term));
  }
  return terms;
}

inline TriangularSystem parse_system(const json& j, const std::string& path) {
  require_keys(j, path, {"preset", "dimension", "phi", "phi_last", "eta", "augment"});
  std::optional<TriangularSystem> sys;
  if (j.contains("preset")) {
    for (const char* key : {"dimension", "phi", "phi_last", "eta"}) {
      if (j.contains(key)) fail(path, "'preset' cannot be combined with '" + std::string(key) + "'");
    }
    try {
      sys = system_preset(as_string(j["preset"], path + ".preset"));
    } catch (const std::invalid_argument& e) {
      fail(path + ".preset", e.what());
    }
  } else {
    const int n = as_int(require(j, path, "dimension"), path + ".dimension");
    const json& phi = require(j, path, "phi");
    if (!phi.is_array()) fail(path + ".phi", "expected an array of term lists");
    if (n < 2 || phi.size() != static_cast<std::size_t>(n - 1)) {
      fail(path + ".phi", "expected dimension-1 = " + std::to_string(n - 1) + " entries, got " +
                              std::to_string(phi.size()));
    }
    std::vector<PhiMap> chain;
    for (std::size_t i = 0; i < phi.size(); ++i) {
      const auto terms = parse_terms(phi[i], path + ".phi[" + std::to_string(i) + "]");
      chain.push_back(terms.empty() ? PhiMap{} : polynomial_phi(terms));
    }
    std::optional<PhiMap> last;
    if (j.contains("phi_last")) {
      const auto terms = parse_terms(j["phi_last"], path + ".phi_last");
      if (!terms.empty()) last = polynomial_phi(terms);
    }
    const Signal eta = parse_signal(require(j, path, "eta"), path + ".eta");
    try {
      sys = TriangularSystem(n, std::move(chain), eta, std::move(last));
    } catch (const std::invalid_argument& e) {
      fail(path, e.what());
    }
  }
  if (j.contains("augment")) {
    const Signal input = parse_signal(j["augment"], path + ".augment");
    try {
      sys = sys->augment_with_input(input);
    } catch (const std::invalid_argument& e) {
      fail(path + ".augment", e.what());
    }
  }
  return *sys;
}

inline MembershipFunction parse_membership(const json& j, const std::string& path) {
  require_keys(j, path, {"label", "points"});
  const auto points = as_number_array(require(j, path, "points"), path + ".points");
  if (points.size() != 3) fail(path + ".points", "expected [left, peak, right]");
  try {
    return MembershipFunction(points[0], points[1], points[2]);
  } catch (const std::invalid_argument& e) {
    fail(path, e.what());
  }
}

inline std::vector<LabeledSet> parse_sets(const json& j, const std::string& path) {
  if (!j.is_array() || j.empty()) fail(path, "expected a non-empty array of labeled sets");
  std::vector<LabeledSet> sets;
  for (std::size_t i = 0; i < j.size(); ++i) {
    const std::string sp = path + "[" + std::to_string(i) + "]";
    const std::string label = as_string(require(j[i], sp, "label"), sp + ".label");
    sets.push_back({label, parse_membership(j[i], sp)});
  }
  return sets;
}

inline SwitchFunction parse_switch(const json& j, const std::string& path) {
  if (j.is_string()) {
    const std::string name = j.get<std::string>();
    if (name == "sign") return SwitchFunction::sign();
    if (name == "psi1") return SwitchFunction::fuzzy(build_standard_psi(1));
    if (name == "psi2") return SwitchFunction::fuzzy(build_standard_psi(2));
    if (name == "psi3") return SwitchFunction::fuzzy(build_standard_psi(3));
    fail(path, "unknown switch '" + name + "' (expected sign, psi1, psi2, psi3 or an object)");
  }
  require_keys(j, path, {"input_scale", "resolution", "input_sets", "output_sets", "rules"});
  auto input_sets = parse_sets(require(j, path, "input_sets"), path + ".input_sets");
  auto output_sets = parse_sets(require(j, path, "output_sets"), path + ".output_sets");
  std::vector<FuzzyRule> rules;
  if (j.contains("rules")) {
    const json& jr = j["rules"];
    if (!jr.is_array()) fail(path + ".rules", "expected an array of rules");
    for (std::size_t i = 0; i < jr.size(); ++i) {
      const std::string rp = path + ".rules[" + std::to_string(i) + "]";
      require_keys(jr[i], rp, {"if", "then"});
      rules.push_back({as_string(require(jr[i], rp, "if"), rp + ".if"),
                       as_string(require(jr[i], rp, "then"), rp + ".then")});
    }
  } else {
    for (const auto& s : input_sets) rules.push_back({s.label, s.label});
  }
  double input_scale = 1.0;
  if (j.contains("input_scale")) input_scale = as_number(j["input_scale"], path + ".input_scale");
  int resolution = FuzzySystem::kDefaultResolution;
  if (j.contains("resolution")) resolution = as_int(j["resolution"], path + ".resolution");
  try {
    return SwitchFunction::fuzzy(FuzzySystem(std::move(input_sets), std::move(output_sets),
                                             std::move(rules), input_scale, resolution));
  } catch (const std::invalid_argument& e) {
    fail(path, e.what());
  }
}

inline ObserverConfig parse_observer(const json& j, const std::string& path) {
  require_keys(j, path,
               {"variant", "lambdas", "alphas", "gate_threshold", "gamma0", "learning_rate",
                "gamma_min", "gamma_max", "fd_delta", "loss_includes_last", "switches"});
  ObserverConfig cfg;
  try {
    cfg.variant = variant_from_string(as_string(require(j, path, "variant"), path + ".variant"));
  } catch (const std::invalid_argument& e) {
    fail(path + ".variant", e.what());
  }
  cfg.lambdas = as_number_array(require(j, path, "lambdas"), path + ".lambdas");
  cfg.alphas = as_number_array(require(j, path, "alphas"), path + ".alphas");
  cfg.gate_threshold =
      as_number(require(j, path, "gate_threshold"), path + ".gate_threshold");
  if (j.contains("gamma0")) cfg.gamma0 = as_number(j["gamma0"], path + ".gamma0");
  if (j.contains("learning_rate")) {
    cfg.learning_rate = as_number(j["learning_rate"], path + ".learning_rate");
  }
  if (j.contains("gamma_min")) cfg.gamma_min = as_number(j["gamma_min"], path + ".gamma_min");
  if (j.contains("gamma_max")) cfg.gamma_max = as_number(j["gamma_max"], path + ".gamma_max");
  if (j.contains("fd_delta")) cfg.fd_delta = as_number(j["fd_delta"], path + ".fd_delta");
  if (j.contains("loss_includes_last")) {
    cfg.loss_includes_last = as_bool(j["loss_includes_last"], path + ".loss_includes_last");
  }
  if (j.contains("switches")) {
    const json& js = j["switches"];
    if (!js.is_array()) fail(path + ".switches", "expected an array");
    for (std::size_t i = 0; i < js.size(); ++i) {
      cfg.switches.push_back(parse_switch(js[i], path + ".switches[" + std::to_string(i) + "]"));
    }
  }
  return cfg;
}

inline Scenario parse_scenario(const json& j, const std::string& path) {
  require_keys(j, path,
               {"system", "z0", "observer", "observer_init", "dt", "T", "record_stride"});
  TriangularSystem system = parse_system(require(j, path, "system"), path + ".system");
  ObserverConfig observer = parse_observer(require(j, path, "observer"), path + ".observer");
  std::vector<double> z0 = as_number_array(require(j, path, "z0"), path + ".z0");
  const json& init = require(j, path, "observer_init");
  require_keys(init, path + ".observer_init", {"z_hat", "z_tilde"});
  ObserverInit oi{
      as_number_array(require(init, path + ".observer_init", "z_hat"),
                      path + ".observer_init.z_hat"),
      as_number_array(require(init, path + ".observer_init", "z_tilde"),
                      path + ".observer_init.z_tilde")};
  const double dt = as_number(require(j, path, "dt"), path + ".dt");
  const double horizon = as_number(require(j, path, "T"), path + ".T");
  int stride = 1;
  if (j.contains("record_stride")) stride = as_int(j["record_stride"], path + ".record_stride");
  Scenario sc{std::move(system), std::move(observer), std::move(z0), std::move(oi),
              dt, horizon, stride};
  try {
    sc.validate();
  } catch (const std::invalid_argument& e) {
    fail(path, e.what());
  }
  return sc;
}

// Objects merge key by key, anything else is replaced by the override.
inline json deep_merge(json base, const json& over) {
  if (!base.is_object() || !over.is_object()) return over;
  for (const auto& [key, value] : over.items()) {
    if (base.contains(key)) {
      base[key] = deep_merge(base[key], value);
    } else {
      base[key] = value;
    }
  }
  return base;
}

}  // namespace cfg_detail

inline const std::vector<std::string>& run_preset_names() { return scenario_preset_names(); }

/// Fully expanded run-config JSON for a built-in preset; every scenario field
/// receives a value.
inline json preset_run_config_json(std::string_view name) {
  const auto observer_json = [](const char* variant, int m, bool adaptive) {
    json obs{{"variant", variant},
             {"lambdas", std::vector<double>(m, 15.0)},
             {"alphas", std::vector<double>(m, 30.0)},
             {"gate_threshold", 0.025}};
    if (adaptive) {
      obs["gamma0"] = 0.5;
      obs["learning_rate"] = 0.004;
      obs["gamma_min"] = 0.05;
      obs["gamma_max"] = 1.0;
      obs["fd_delta"] = 1e-3;
      obs["loss_includes_last"] = true;
    }
    return obs;
  };
  json doc{{"name", std::string(name)}, {"output", json{{"plot", false}}}};
  if (name == "fig1-sign-1e5") {
    doc["scenario"] = json{{"system", json{{"preset", "paper-example-3state"}}},
                           {"z0", {0.2, 0.2, 0.2}},
                           {"observer", observer_json("sign", 3, false)},
                           {"observer_init", json{{"z_hat", {0.05, 0.0, 0.05}},
                                                  {"z_tilde", {0.05, 0.0, 0.05}}}},
                           {"dt", 1e-5},
                           {"T", 20.0},
                           {"record_stride", 10}};
    return doc;
  }
  const json aug_init{{"z_hat", {0.05, 0.0, 0.05, 0.05}}, {"z_tilde", {0.05, 0.0, 0.0, 0.05}}};
  const json aug_z0{0.2, 0.2, 0.2, 0.2};
  if (name == "fig3-sign-1e3" || name == "fig3-fuzzy-1e3") {
    const bool fuzzy = name == "fig3-fuzzy-1e3";
    doc["scenario"] = json{{"system", json{{"preset", "paper-example-augmented"}}},
                           {"z0", aug_z0},
                           {"observer", observer_json(fuzzy ? "fuzzy" : "sign", 4, false)},
                           {"observer_init", aug_init},
                           {"dt", 1e-3},
                           {"T", 20.0},
                           {"record_stride", 1}};
    return doc;
  }
  if (name == "fig4-adaptive") {
    doc["scenario"] = json{{"system", json{{"preset", "paper-example-augmented-hf"}}},
                           {"z0", aug_z0},
                           {"observer", observer_json("adaptive", 4, true)},
                           {"observer_init", aug_init},
                           {"dt", 1e-3},
                           {"T", 20.0},
                           {"record_stride", 1}};
    return doc;
  }
  std::string known;
  for (const auto& n : run_preset_names()) known += " " + n;
  throw ConfigError("unknown preset '" + std::string(name) + "'; known:" + known);
}

/// Parse and validate one run config. A `preset` key expands to the built-in
/// document first; any user keys are deep-merged on top of it. Unknown keys
/// anywhere are rejected with their path.
inline RunConfig parse_run_config_json(const json& input) {
  cfg_detail::require_keys(input, "config", {"name", "preset", "scenario", "output"});
  json doc;
  if (input.contains("preset")) {
    doc = preset_run_config_json(
        cfg_detail::as_string(input["preset"], "config.preset"));
    json overrides = input;
    overrides.erase("preset");
    doc = cfg_detail::deep_merge(doc, overrides);
  } else {
    doc = input;
    if (!doc.contains("scenario")) {
      cfg_detail::fail("config", "need either 'preset' or 'scenario'");
    }
  }
  std::string name = "run";
  if (doc.contains("name")) name = cfg_detail::as_string(doc["name"], "config.name");
  Scenario scenario = cfg_detail::parse_scenario(doc["scenario"], "scenario");
  OutputOptions output;
  if (doc.contains("output")) {
    const json& out = doc["output"];
    cfg_detail::require_keys(out, "output", {"plot", "channels"});
    if (out.contains("plot")) output.plot = cfg_detail::as_bool(out["plot"], "output.plot");
    if (out.contains("channels")) {
      const json& ch = out["channels"];
      if (!ch.is_array()) cfg_detail::fail("output.channels", "expected an array of integers");
      for (std::size_t i = 0; i < ch.size(); ++i) {
        const int c = cfg_detail::as_int(ch[i], "output.channels[" + std::to_string(i) + "]");
        if (c < 1 || c > scenario.system.dimension()) {
          cfg_detail::fail("output.channels[" + std::to_string(i) + "]",
                           "channel out of range 1.." +
                               std::to_string(scenario.system.dimension()));
        }
        output.channels.push_back(c);
      }
    }
  }
  return RunConfig{std::move(name), std::move(scenario), std::move(output), doc["scenario"]};
}

inline RunConfig parse_run_config_text(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  return parse_run_config_json(doc);
}

inline RunConfig parse_run_config_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  try {
    return parse_run_config_text(buf.str());
  } catch (const ConfigError& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

/// CLI convenience: a spec starting with '{' is inline JSON, anything else is
/// a file path.
inline RunConfig load_run_config(const std::string& spec) {
  const auto first = spec.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && spec[first] == '{') {
    return parse_run_config_text(spec);
  }
  return parse_run_config_file(spec);
}

/// Fields that must agree between runs being compared; returns the paths of
/// subtrees that differ (empty when compatible).
inline std::vector<std::string> comparison_incompatibilities(const RunConfig& a,
                                                             const RunConfig& b) {
  std::vector<std::string> diffs;
  for (const char* key : {"system", "z0", "observer_init"}) {
    if (a.normalized.value(key, json()) != b.normalized.value(key, json())) {
      diffs.push_back("scenario." + std::string(key));
    }
  }
  return diffs;
}

}  // namespace fasmo
