#pragma once

// Scenario configuration: one JSON document, every object checked against
// its key list so that typos fail loudly.

#include <fstream>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "cnls/analytic/formulas.hpp"
#include "cnls/bvp/newton.hpp"
#include "cnls/errors.hpp"

namespace cnls::runner {

using nlohmann::json;

inline const std::vector<std::string>& scenario_names() {
  static const std::vector<std::string> n = {"diagram", "asymptotics", "eigenloci", "geneig", "verify"};
  return n;
}

struct ContinuationNumerics {
  double initial_step = 0.05;
  double min_step = 1e-7;
  double max_step = 1.0;
  int max_steps = 2000;
  double fold_tolerance = 1e-8;
};

struct ScenarioConfig {
  std::string scenario = "verify";
  analytic::ModelParams model{1.0, 4.0, 0.0, 2.0};
  std::optional<std::pair<double, double>> domain;  // scenario default when unset
  int ntst = 200;
  int ncol = 4;
  bvp::NewtonSettings newton{1e-10, 20, 1.0, 8};
  ContinuationNumerics continuation;
  std::vector<int> ells;  // scenario default when empty
  std::optional<std::pair<double, double>> beta1_range;
  double amplitude = 0.05;
  std::vector<double> targets = {50.0, 100.0};
  std::vector<int> runs = {1, 2, 3, 4, 5};

  void validate() const;
};

inline std::pair<double, double> default_domain(const std::string& scenario) {
  if (scenario == "asymptotics") return {-8.0, 8.0};
  if (scenario == "eigenloci") return {-11.0, 11.0};
  if (scenario == "geneig") return {-9.0, 9.0};
  return {-7.0, 7.0};
}

inline std::pair<double, double> default_beta1_range(const std::string& scenario) {
  if (scenario == "diagram") return {2.0, 25.0};
  return {2.0, 100.0};
}

inline std::vector<int> default_ells(const std::string& scenario) {
  if (scenario == "eigenloci") return {1, 2, 3, 4};
  return {0, 1, 2, 3, 4};
}

inline std::pair<double, double> domain_of(const ScenarioConfig& c) {
  return c.domain ? *c.domain : default_domain(c.scenario);
}
inline std::pair<double, double> beta1_range_of(const ScenarioConfig& c) {
  return c.beta1_range ? *c.beta1_range : default_beta1_range(c.scenario);
}
inline std::vector<int> ells_of(const ScenarioConfig& c) { return c.ells.empty() ? default_ells(c.scenario) : c.ells; }

inline void ScenarioConfig::validate() const {
  bool known = false;
  for (const auto& n : scenario_names()) known = known || n == scenario;
  if (!known) throw ConfigError("config: unknown scenario '" + scenario + "'");
  try {
    model.validate();
    newton.validate();
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  if (!(model.beta2 > 0.0)) throw ConfigError("config: model.beta2 must be positive");
  const auto d = domain_of(*this);
  if (!(d.first < 0.0 && d.second > 0.0)) throw ConfigError("config: domain must satisfy x- < 0 < x+");
  if (ntst < 4) throw ConfigError("config: mesh.ntst must be at least 4");
  if (ncol < 2 || ncol > 7) throw ConfigError("config: mesh.ncol must lie in [2, 7]");
  const auto& c = continuation;
  if (!(c.min_step > 0 && c.min_step <= c.initial_step && c.initial_step <= c.max_step))
    throw ConfigError("config: need 0 < min_step <= initial_step <= max_step");
  if (c.max_steps < 1) throw ConfigError("config: continuation.max_steps must be positive");
  if (!(c.fold_tolerance > 0)) throw ConfigError("config: continuation.fold_tolerance must be positive");
  for (int l : ells)
    if (l < 0 || l > 8) throw ConfigError("config: ells entries must lie in [0, 8]");
  const auto r = beta1_range_of(*this);
  if (!(r.first < r.second) || !(r.first > 0)) throw ConfigError("config: beta1_range must satisfy 0 < lo < hi");
  if (!(amplitude > 0 && amplitude < 1)) throw ConfigError("config: amplitude must lie in (0, 1)");
  for (double t : targets)
    if (!(t > 0)) throw ConfigError("config: targets must be positive");
  std::set<int> seen;
  for (int k : runs) {
    if (k < 1 || k > 5) throw ConfigError("config: runs entries must lie in 1..5");
    if (!seen.insert(k).second) throw ConfigError("config: duplicate run " + std::to_string(k));
  }
  // C1 is made by runs 1-2, C2 by run 4
  auto need = [&](int k, int dep) {
    if (seen.count(k) && !seen.count(dep))
      throw ConfigError("config: run " + std::to_string(k) + " needs run " + std::to_string(dep));
  };
  need(2, 1);
  need(3, 2);
  need(4, 2);
  need(5, 4);
}

namespace detail {

inline void check_keys(const json& j, const std::string& where, std::initializer_list<const char*> allowed) {
  if (!j.is_object()) throw ConfigError("config: '" + where + "' must be an object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || it.key() == a;
    if (!ok) throw ConfigError("config: unknown key '" + where + (where.empty() ? "" : ".") + it.key() + "'");
  }
}

template <class T>
void read(const json& j, const char* key, T& out, const std::string& where) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError("config: bad value for '" + where + key + "'");
  }
}

inline std::pair<double, double> read_pair(const json& j, const std::string& key) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
    throw ConfigError("config: '" + key + "' must be a two-element number array");
  return {j[0].get<double>(), j[1].get<double>()};
}

}  // namespace detail

/// Fields present in `j` override `base`.
inline ScenarioConfig parse_config(const json& j, ScenarioConfig base = {}) {
  using detail::check_keys;
  using detail::read;
  check_keys(j, "", {"scenario", "model", "domain", "mesh", "newton", "continuation", "ells", "beta1_range",
                     "amplitude", "targets", "runs"});
  ScenarioConfig c = std::move(base);
  read(j, "scenario", c.scenario, "");
  if (j.contains("model")) {
    const auto& m = j["model"];
    check_keys(m, "model", {"omega", "s", "beta2"});
    read(m, "omega", c.model.omega, "model.");
    read(m, "s", c.model.s, "model.");
    read(m, "beta2", c.model.beta2, "model.");
  }
  if (j.contains("domain")) c.domain = detail::read_pair(j["domain"], "domain");
  if (j.contains("mesh")) {
    const auto& m = j["mesh"];
    check_keys(m, "mesh", {"ntst", "ncol"});
    read(m, "ntst", c.ntst, "mesh.");
    read(m, "ncol", c.ncol, "mesh.");
  }
  if (j.contains("newton")) {
    const auto& n = j["newton"];
    check_keys(n, "newton", {"residual_tol", "max_iterations", "damping", "max_halvings"});
    read(n, "residual_tol", c.newton.residual_tol, "newton.");
    read(n, "max_iterations", c.newton.max_iterations, "newton.");
    read(n, "damping", c.newton.damping, "newton.");
    read(n, "max_halvings", c.newton.max_halvings, "newton.");
  }
  if (j.contains("continuation")) {
    const auto& n = j["continuation"];
    check_keys(n, "continuation", {"initial_step", "min_step", "max_step", "max_steps", "fold_tolerance"});
    auto& k = c.continuation;
    read(n, "initial_step", k.initial_step, "continuation.");
    read(n, "min_step", k.min_step, "continuation.");
    read(n, "max_step", k.max_step, "continuation.");
    read(n, "max_steps", k.max_steps, "continuation.");
    read(n, "fold_tolerance", k.fold_tolerance, "continuation.");
  }
  read(j, "ells", c.ells, "");
  if (j.contains("beta1_range")) c.beta1_range = detail::read_pair(j["beta1_range"], "beta1_range");
  read(j, "amplitude", c.amplitude, "");
  read(j, "targets", c.targets, "");
  read(j, "runs", c.runs, "");
  c.validate();
  return c;
}

inline ScenarioConfig load_config(const std::string& path, ScenarioConfig base = {}) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open " + path);
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  return parse_config(j, std::move(base));
}

inline json config_to_json(const ScenarioConfig& c) {
  const auto d = domain_of(c);
  const auto r = beta1_range_of(c);
  return json{{"scenario", c.scenario},
              {"model", {{"omega", c.model.omega}, {"s", c.model.s}, {"beta2", c.model.beta2}}},
              {"domain", {d.first, d.second}},
              {"mesh", {{"ntst", c.ntst}, {"ncol", c.ncol}}},
              {"newton",
               {{"residual_tol", c.newton.residual_tol},
                {"max_iterations", c.newton.max_iterations},
                {"damping", c.newton.damping},
                {"max_halvings", c.newton.max_halvings}}},
              {"continuation",
               {{"initial_step", c.continuation.initial_step},
                {"min_step", c.continuation.min_step},
                {"max_step", c.continuation.max_step},
                {"max_steps", c.continuation.max_steps},
                {"fold_tolerance", c.continuation.fold_tolerance}}},
              {"ells", ells_of(c)},
              {"beta1_range", {r.first, r.second}},
              {"amplitude", c.amplitude},
              {"targets", c.targets},
              {"runs", c.runs}};
}

}  // namespace cnls::runner
