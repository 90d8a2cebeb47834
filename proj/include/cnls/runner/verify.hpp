#pragma once

// Acceptance suite: criteria 1-11, each with its measured values. A failure is
// a report entry, never an exception.

#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include <json.hpp>

#include "cnls/analytic/bif_coefficients.hpp"
#include "cnls/runner/fd_oracle.hpp"
#include "cnls/runner/properties.hpp"
#include "cnls/runner/scenarios.hpp"

namespace cnls::runner {

struct CriterionResult {
  int id = 0;
  std::string name;
  bool passed = false;
  std::string measured;
};

struct VerifyReport {
  std::vector<CriterionResult> criteria;
  json references = json::array();
  json summary;
  bool all_passed() const {
    for (const auto& c : criteria)
      if (!c.passed) return false;
    return !criteria.empty();
  }
};

namespace detail {

inline std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

struct Reference {
  int ell;
  double beta1;
  double b_bar2;
  double b_bar2_unit;  // one unit in the last quoted digit
};

inline const std::vector<Reference>& reference_values() {
  static const std::vector<Reference> t = {{0, 3, 5.486, 1e-3},
                                           {1, 6, 0.3879, 1e-4},
                                           {2, 10, 0.03650, 1e-5},
                                           {3, 15, 0.001333, 1e-6},
                                           {4, 21, -0.002094, 1e-6}};
  return t;
}

}  // namespace detail

/// Scenario configurations used by the suite: the base config with the
/// scenario's own domain and ranges.
inline ScenarioConfig verify_config(const ScenarioConfig& base, const std::string& scenario) {
  ScenarioConfig c = base;
  c.scenario = scenario;
  c.domain.reset();
  c.ells.clear();
  c.beta1_range.reset();
  c.targets = {50.0, 100.0};
  c.runs = {1, 2, 3, 4, 5};
  return c;
}

inline VerifyReport run_verify_suite(const ScenarioConfig& base,
                                     const std::function<void(const CriterionResult&)>& on_result = {}) {
  using detail::fmt;
  VerifyReport rep;
  const auto& m = base.model;
  auto add = [&](int id, std::string name, bool ok, std::string measured) {
    rep.criteria.push_back({id, std::move(name), ok, std::move(measured)});
    if (on_result) on_result(rep.criteria.back());
  };
  auto guarded = [&](int id, const std::string& name, const std::function<void()>& body) {
    try {
      body();
    } catch (const std::exception& e) {
      add(id, name, false, std::string("error: ") + e.what());
    }
  };

  // 1, 2: critical couplings and bifurcation coefficients
  double worst_beta = 0, worst_b2 = 0;
  bool b2_ok = true;
  std::string b2_text;
  guarded(1, "critical couplings", [&] {
    for (const auto& r : detail::reference_values()) {
      const double b = analytic::critical_coupling(m.omega, m.s, r.ell);
      const double b2 = analytic::bif_coefficients(m.s / m.omega, m.beta2, r.ell).b_bar2;
      worst_beta = std::max(worst_beta, std::abs(b - r.beta1));
      const double units = std::abs(b2 - r.b_bar2) / r.b_bar2_unit;
      b2_ok = b2_ok && units <= 1.0;
      worst_b2 = std::max(worst_b2, units);
      rep.references.push_back({{"ell", r.ell},
                            {"beta1", b},
                            {"beta1_reference", r.beta1},
                            {"b_bar2", b2},
                            {"b_bar2_reference", r.b_bar2}});
    }
    add(1, "critical couplings", worst_beta <= 1e-12, "max |beta1 - reference| = " + fmt("%.3g", worst_beta));
    add(2, "bifurcation coefficients", b2_ok, "max deviation in last-digit units = " + fmt("%.3f", worst_b2));
  });
  if (rep.criteria.size() == 1) add(2, "bifurcation coefficients", false, "not evaluated");

  double worst_dummy_seen = 0;
  auto track = [&](const cont::Branch& br) { worst_dummy_seen = std::max(worst_dummy_seen, worst_dummy(br)); };

  // 3, 4, 5: bifurcation diagram on the default domain
  std::optional<CollocationSolution> converged;
  guarded(3, "branch criticality", [&] {
    const auto d = compute_diagram(verify_config(base, "diagram"));
    track(d.fundamental);
    for (const auto& b : d.branches) track(b.branch);
    bool crit = true;
    std::string t;
    for (const auto& b : d.branches) {
      const int expected = b.b_bar2 > 0 ? 1 : -1;
      crit = crit && b.error.empty() && b.criticality == expected;
      t += "ell" + std::to_string(b.ell) + ":" + (b.criticality > 0 ? "+" : b.criticality < 0 ? "-" : "0") + " ";
    }
    add(3, "branch criticality", crit, t + "(sign of beta1 - onset vs sign of b_bar2)");

    const auto* b4 = d.find(4);
    const bool fold_ok = b4 && b4->fold && std::abs(*b4->fold - 19.41626) <= 1e-3;
    add(4, "saddle-node on the fifth branch", fold_ok,
        b4 && b4->fold ? "fold at beta1 = " + fmt("%.8f", *b4->fold) : "no fold found");

    bool zeros = true;
    std::string z;
    for (int ell = 0; ell <= 3; ++ell) {
      const double level = ell < 3 ? 12.0 : 16.0;
      const auto* b = d.find(ell);
      const int n = b && b->zero_counts.count(level) ? b->zero_counts.at(level) : -1;
      zeros = zeros && n == ell;
      z += "ell" + std::to_string(ell) + "@" + fmt("%g", level) + ":" + std::to_string(n) + " ";
    }
    add(5, "zero counts", zeros, z);
    if (const auto* b0 = d.find(0))
      if (const auto* s = find_special(b0->branch, level_label(12.0))) converged = s->location.solution;
  });
  while (rep.criteria.size() < 5) add(static_cast<int>(rep.criteria.size()) + 1, "diagram", false, "not evaluated");

  // 6, 7: eigenvalue paths
  guarded(6, "eigenvalue onsets", [&] {
    const auto e = compute_eigenloci(verify_config(base, "eigenloci"));
    for (const auto& p : e.paths) track(p.branch);
    bool ok6 = true;
    std::string t6;
    const double expected[2] = {12.0, 5.0};
    for (const auto& p : e.paths) {
      if (p.ell != 2) continue;
      const bool onset = std::abs(p.onset_beta1 - 10.0) <= 1e-10 && std::abs(p.onset_lambda_i - expected[p.k]) <= 1e-10;
      const bool reached = p.error.empty() && std::abs(p.reached_beta1 - 100.0) <= 1e-8;
      const bool positive = p.min_lambda_r && *p.min_lambda_r > 0;
      ok6 = ok6 && onset && reached && positive;
      t6 += path_id(p.ell, p.k) + ": onset " + fmt("%.12g", p.onset_lambda_i) + "i, min lambda_R " +
            (p.min_lambda_r ? fmt("%.4g", *p.min_lambda_r) : std::string("n/a")) + ", reached " +
            fmt("%g", p.reached_beta1) + "; ";
    }
    add(6, "eigenvalue onsets and instability", ok6, t6);

    bool ok7 = !e.paths.empty();
    std::string t7;
    for (const auto& p : e.paths) {
      if (!p.samples.count(50.0) || !p.samples.count(100.0)) {
        ok7 = false;
        t7 += path_id(p.ell, p.k) + ": missing samples; ";
        continue;
      }
      const auto a = p.samples.at(50.0), b = p.samples.at(100.0);
      const double dr = std::abs(a.first - b.first), di = std::abs(a.second - b.second);
      ok7 = ok7 && dr < 1e-2 && di < 1e-2;
      t7 += path_id(p.ell, p.k) + ": |dRe| " + fmt("%.3g", dr) + " |dIm| " + fmt("%.3g", di) + "; ";
    }
    add(7, "large-beta1 saturation", ok7, t7);
  });
  while (rep.criteria.size() < 7) add(static_cast<int>(rep.criteria.size()) + 1, "eigenloci", false, "not evaluated");

  // 8, 9: generalized-eigenfunction protocol
  guarded(8, "gen-eig protocol", [&] {
    const auto g = compute_geneig(verify_config(base, "geneig"));
    track(g.approach);
    for (const auto& r : g.runs) track(r.branch);
    bool all_runs = g.approach_error.empty();
    for (const auto& r : g.runs) all_runs = all_runs && r.status == "ok";
    const double e3 = g.runs.size() > 2 && g.runs[2].fold_eps1 ? std::abs(*g.runs[2].fold_eps1) : INFINITY;
    const double e5 = g.runs.size() > 4 && g.runs[4].fold_eps1 ? std::abs(*g.runs[4].fold_eps1) : INFINITY;
    const double diff = g.eta_difference ? *g.eta_difference : INFINITY;
    const bool ok8 = all_runs && std::abs(g.c0 - 0.074836) <= 1e-4 && e3 < 1e-6 && e5 < 1e-6 && diff < 1e-4;
    add(8, "gen-eig protocol", ok8,
        "c0 = " + fmt("%.7f", g.c0) + ", |eps1| at folds " + fmt("%.3g", e3) + ", " + fmt("%.3g", e5) +
            ", fold eta difference " + fmt("%.3g", diff) + " (sign " + std::to_string(g.eta_sign) + ")" +
            (all_runs ? "" : ", a run failed"));
    const bool ok9 = g.fredholm && std::abs(g.fredholm->I1 - 1.492) <= 0.02 && std::abs(g.fredholm->I2 + 0.373) <= 0.02;
    add(9, "Fredholm integrals", ok9,
        g.fredholm ? "I1 = " + fmt("%.6f", g.fredholm->I1) + ", I2 = " + fmt("%.6f", g.fredholm->I2)
                   : std::string("no fold eigenfunction"));
  });
  while (rep.criteria.size() < 9) add(static_cast<int>(rep.criteria.size()) + 1, "geneig", false, "not evaluated");

  // 10: property suite
  guarded(10, "property suite", [&] {
    const double res = std::max(fundamental_residual(m.omega), fundamental_residual(2.5));
    double jac = 0;
    jac = std::max(jac, pointwise_jacobian_gap(systems::homoclinic_system(), m, 1));
    jac = std::max(jac, pointwise_jacobian_gap(systems::eigen_system(), m, 2));
    jac = std::max(jac, pointwise_jacobian_gap(systems::geneig_system(1.0 / 18.0), m, 3));
    {
      auto mm = m;
      mm.beta1 = 10.0;
      const auto h = systems::fundamental_seed(mm, bvp::Mesh::uniform(-4, 4, 5, 4));
      auto e = systems::eigen_seed(h, 0, 0.2);
      auto esys = systems::eigen_system();
      systems::set_reference(esys, e);
      jac = std::max(jac, collocation_jacobian_gap(esys, e));
      auto g = systems::geneig_seed(h);
      g.parameters[systems::EPS1] = 0.3;
      auto gsys = systems::geneig_system();
      systems::set_reference(gsys, g);
      jac = std::max(jac, collocation_jacobian_gap(gsys, g));
    }
    double order = INFINITY;
    for (int ncol = 2; ncol <= 4; ++ncol) order = std::min(order, collocation_order(ncol) - 2.0 * ncol);
    KernelCheck kernel{INFINITY, INFINITY, INFINITY, 0};
    if (converged) kernel = kernel_state_check(*converged);
    const int deg = converged ? converged->mesh.collocation_degree : 0;
    const bool kernel_ok = kernel.gauge < 1e-8 && kernel.order > deg - 0.5;
    const bool ok = res < 1e-9 && worst_dummy_seen < 1e-8 && kernel_ok && order > -0.5 && jac < 1e-6;
    add(10, "property suite", ok,
        "analytic residual " + fmt("%.3g", res) + ", max |d1|,|d2| " + fmt("%.3g", worst_dummy_seen) +
            ", kernel phi2/phi3 " + fmt("%.3g", kernel.gauge) + " phi1 " + fmt("%.3g", kernel.translation) +
            " -> " + fmt("%.3g", kernel.translation_fine) + " (order " + fmt("%.2f", kernel.order) + ")" + ", nodal order - 2m " + fmt("%+.2f", order) +
            ", Jacobian gap " + fmt("%.3g", jac));
  });

  // 11: finite-difference oracle
  guarded(11, "finite-difference spectrum", [&] {
    auto mm = m;
    mm.beta1 = 10.0;
    const auto fd = fd_spectrum_check(mm, 20.0, 4000);
    std::string t;
    for (double v : fd.computed) t += fmt("%.8f", v) + " ";
    add(11, "finite-difference spectrum", fd.max_error < 1e-4, t + "max error " + fmt("%.3g", fd.max_error));
  });

  json crit = json::array();
  for (const auto& c : rep.criteria)
    crit.push_back({{"id", c.id}, {"name", c.name}, {"passed", c.passed}, {"measured", c.measured}});
  rep.summary = {{"scenario", "verify"}, {"criteria", crit}, {"references", rep.references}, {"all_passed", rep.all_passed()}};
  return rep;
}

inline VerifyReport run_verify(const ScenarioConfig& c, const fs::path& out_dir,
                               const std::function<void(const CriterionResult&)>& on_result = {}) {
  auto rep = run_verify_suite(c, on_result);
  write_json(out_dir / "verify" / "summary.json", rep.summary);
  return rep;
}

}  // namespace cnls::runner
