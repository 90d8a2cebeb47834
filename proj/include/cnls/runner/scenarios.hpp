#pragma once

// The four experiments: bifurcation diagram, scaled large-beta1 profiles,
// eigenvalue paths along the bifurcated branches, and the five-run
// generalized-eigenfunction protocol at the saddle-node of the ell = 4 branch.

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "cnls/analytic/bif_coefficients.hpp"
#include "cnls/analytic/formulas.hpp"
#include "cnls/continuation/branch_switch.hpp"
#include "cnls/continuation/continuation.hpp"
#include "cnls/runner/config.hpp"
#include "cnls/runner/output.hpp"
#include "cnls/systems/seeds.hpp"

namespace cnls::runner {

using bvp::CollocationSolution;
using nlohmann::json;

// ------------------------------------------------------------------ helpers

inline bvp::Mesh mesh_of(const ScenarioConfig& c) {
  const auto d = domain_of(c);
  return bvp::Mesh::uniform(d.first, d.second, c.ntst, c.ncol);
}

inline std::map<std::string, double> diagnostics_map(const CollocationSolution& s) {
  const auto d = systems::diagnostics(s);
  std::map<std::string, double> m{{"norm_U", d.norm_U}, {"norm_V", d.norm_V}, {"z_minus", d.z_minus},
                                  {"z_plus", d.z_plus}};
  if (s.state_dim != 4) {
    m["norm_eta"] = d.norm_eta;
    m["eta_minus"] = d.eta_minus;
    m["eta_plus"] = d.eta_plus;
  }
  return m;
}

inline cont::ContinuationSettings base_settings(const ScenarioConfig& c) {
  cont::ContinuationSettings cs;
  cs.initial_step = c.continuation.initial_step;
  cs.min_step = c.continuation.min_step;
  cs.max_step = c.continuation.max_step;
  cs.max_steps = c.continuation.max_steps;
  cs.fold_tolerance = c.continuation.fold_tolerance;
  cs.newton.residual_tol = c.newton.residual_tol;
  cs.newton.max_halvings = c.newton.max_halvings;
  cs.diagnostics = diagnostics_map;
  return cs;
}

/// Tangent orientation along which the V amplitude grows (V is state 1 in
/// every system).
inline double v_growth(const Eigen::VectorXd& t, const cont::BranchPoint& p) {
  const auto& v = p.solution.values;
  double acc = 0;
  for (int j = 0; j < p.solution.point_count(); ++j) acc += t[j * v.rows() + 1] * v(1, j);
  return acc;
}

inline double beta1_of(const cont::BranchPoint& p) { return p.solution.parameters[systems::BETA1]; }
inline double tangent_principal(const cont::BranchPoint& p) { return p.tangent[p.tangent.size() - 1]; }

inline cont::Event beta1_event(const std::string& name, double value, bool terminal = false) {
  return {name, [value](const cont::BranchPoint& p) { return beta1_of(p) - value; }, 1e-10, terminal};
}

inline std::string level_label(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "B%g", v);
  return buf;
}

inline const cont::SpecialPoint* find_special(const cont::Branch& br, const std::string& label) {
  for (const auto& s : br.specials)
    if (s.label == label) return &s;
  return nullptr;
}

inline const cont::SpecialPoint* first_fold(const cont::Branch& br) {
  for (const auto& s : br.specials)
    if (s.kind == cont::SpecialKind::FOLD) return &s;
  return nullptr;
}

/// Runs a continuation and keeps the partial branch on a stall. Returns the
/// error text (empty on success).
inline std::string run_branch(const bvp::BvpSystem& sys, const CollocationSolution& start, const std::string& principal,
                              const cont::ContinuationSettings& cs, cont::Branch& out) {
  try {
    cont::Continuation c(sys, principal, cs);
    c.run(start, out);
  } catch (const StallError& e) {
    return e.what();
  } catch (const Error& e) {
    out.stop_reason = "error";
    return e.what();
  }
  return {};
}

inline int v_sign_changes(const CollocationSolution& s) {
  const double vmax = s.values.row(1).cwiseAbs().maxCoeff();
  return systems::sign_changes(s, 1, 1e-6 * vmax);
}

inline json branch_health(const cont::Branch& br) {
  return {{"points", br.points.size()},
          {"stop_reason", br.stop_reason},
          {"max_boundary_distance", worst_boundary(br)},
          {"max_dummy", worst_dummy(br)},
          {"warnings", br.warnings.size()}};
}

// ------------------------------------------------------------------ diagram

struct BifurcatedBranch {
  int ell = 0;
  double onset = 0;           // analytic beta1^(ell)
  double seed_beta1 = 0;      // beta1 of the corrected seed
  int criticality = 0;        // sign of beta1 - onset at the first continued point
  double b_bar2 = 0;
  std::optional<double> fold;
  std::map<double, int> zero_counts;  // V sign changes at the sampling levels
  cont::Branch branch;
  std::string error;
};

struct DiagramResult {
  cont::Branch fundamental;
  std::string fundamental_error;
  std::vector<BifurcatedBranch> branches;
  json summary;
  const BifurcatedBranch* find(int ell) const {
    for (const auto& b : branches)
      if (b.ell == ell) return &b;
    return nullptr;
  }
};

inline std::vector<double> zero_count_levels() { return {12.0, 16.0}; }

/// Seeded bifurcated homoclinic branch from beta1^(ell) to beta1 = hi.
inline BifurcatedBranch compute_bifurcated_branch(const ScenarioConfig& c, int ell, double hi,
                                                  const std::vector<double>& levels) {
  BifurcatedBranch b;
  b.ell = ell;
  b.onset = analytic::critical_coupling(c.model.omega, c.model.s, ell);
  b.b_bar2 = analytic::bif_coefficients(c.model.s / c.model.omega, c.model.beta2, ell).b_bar2;
  try {
    const auto seed = cont::correct_branch_seed(c.model, ell, c.amplitude, mesh_of(c), c.newton).solution;
    b.seed_beta1 = seed.parameters[systems::BETA1];
    auto cs = base_settings(c);
    cs.orient = v_growth;
    cs.target = hi;
    for (double v : levels)
      if (v < hi) cs.events.push_back(beta1_event(level_label(v), v));
    auto sys = systems::homoclinic_system();
    systems::set_reference(sys, seed);
    b.error = run_branch(sys, seed, "beta1", cs, b.branch);
  } catch (const Error& e) {
    b.error = e.what();
  }
  if (b.branch.points.size() > 1) {
    const double d = beta1_of(b.branch.points[1]) - b.onset;
    b.criticality = d > 0 ? 1 : (d < 0 ? -1 : 0);
  }
  if (const auto* f = first_fold(b.branch)) b.fold = f->location.principal_value;
  for (double v : levels)
    if (const auto* s = find_special(b.branch, level_label(v))) b.zero_counts[v] = v_sign_changes(s->location.solution);
  return b;
}

inline DiagramResult compute_diagram(const ScenarioConfig& c) {
  DiagramResult r;
  const auto [lo, hi] = beta1_range_of(c);
  const auto ells = ells_of(c);
  // fundamental branch with the pitchfork points marked
  try {
    auto m = c.model;
    m.beta1 = lo;
    auto sys = systems::homoclinic_system();
    const auto guess = systems::fundamental_seed(m, mesh_of(c));
    systems::set_reference(sys, guess);
    const auto start = bvp::solve_newton(sys, guess, c.newton).solution;
    auto cs = base_settings(c);
    cs.target = hi;
    cs.max_step = std::max(cs.max_step, 1.0);
    for (int ell : ells) {
      const double b = analytic::critical_coupling(c.model.omega, c.model.s, ell);
      if (b > lo && b < hi) cs.events.push_back(beta1_event("BP" + std::to_string(ell), b));
    }
    r.fundamental_error = run_branch(sys, start, "beta1", cs, r.fundamental);
  } catch (const Error& e) {
    r.fundamental_error = e.what();
  }
  for (int ell : ells) r.branches.push_back(compute_bifurcated_branch(c, ell, hi, zero_count_levels()));

  json br = json::array();
  for (const auto& b : r.branches) {
    json zc = json::object();
    for (const auto& [v, n] : b.zero_counts) zc[format_double(v)] = n;
    br.push_back({{"id", "ell" + std::to_string(b.ell)},
                  {"ell", b.ell},
                  {"onset_beta1", b.onset},
                  {"seed_beta1", b.seed_beta1},
                  {"b_bar2", b.b_bar2},
                  {"criticality", b.criticality},
                  {"fold_beta1", b.fold ? json(*b.fold) : json(nullptr)},
                  {"zero_counts", zc},
                  {"specials", specials_json(b.branch)},
                  {"health", branch_health(b.branch)},
                  {"error", b.error}});
  }
  r.summary = {{"scenario", "diagram"},
               {"fundamental",
                {{"specials", specials_json(r.fundamental)},
                 {"health", branch_health(r.fundamental)},
                 {"error", r.fundamental_error}}},
               {"branches", br}};
  return r;
}

// -------------------------------------------------------------- asymptotics

struct ScaledProfiles {
  int ell = 0;
  std::map<double, CollocationSolution> raw;     // unscaled solutions at the targets
  std::map<double, CollocationSolution> scaled;  // sqrt(beta1) * (U, V, U', V')
  std::optional<double> difference;              // max |scaled(t0) - scaled(t1)| over U, V
  cont::Branch branch;
  std::string error;
};

struct AsymptoticsResult {
  std::vector<ScaledProfiles> profiles;
  json summary;
};

inline CollocationSolution scale_profile(const CollocationSolution& s) {
  auto out = s;
  out.values.topRows(4) *= std::sqrt(s.parameters[systems::BETA1]);
  return out;
}

inline AsymptoticsResult compute_asymptotics(const ScenarioConfig& c) {
  AsymptoticsResult r;
  if (c.targets.empty()) throw ConfigError("asymptotics: no targets");
  const double top = *std::max_element(c.targets.begin(), c.targets.end());
  for (int ell : ells_of(c)) {
    ScaledProfiles p;
    p.ell = ell;
    auto b = compute_bifurcated_branch(c, ell, top, c.targets);
    p.error = b.error;
    for (double t : c.targets) {
      const CollocationSolution* s = nullptr;
      if (const auto* sp = find_special(b.branch, level_label(t))) s = &sp->location.solution;
      if (!s && b.branch.stop_reason == "target" && t == top) s = &b.branch.points.back().solution;
      if (!s) continue;
      p.raw.emplace(t, *s);
      p.scaled.emplace(t, scale_profile(*s));
    }
    if (c.targets.size() >= 2 && p.scaled.count(c.targets[0]) && p.scaled.count(c.targets[1])) {
      const auto& a = p.scaled.at(c.targets[0]).values;
      const auto& d = p.scaled.at(c.targets[1]).values;
      p.difference = (a.topRows(2) - d.topRows(2)).cwiseAbs().maxCoeff();
    }
    p.branch = std::move(b.branch);
    r.profiles.push_back(std::move(p));
  }
  json arr = json::array();
  for (const auto& p : r.profiles)
    arr.push_back({{"id", "ell" + std::to_string(p.ell)},
                   {"ell", p.ell},
                   {"targets_reached", [&] {
                      json t = json::array();
                      for (const auto& [v, s] : p.scaled) t.push_back(v);
                      return t;
                    }()},
                   {"scaled_difference", p.difference ? json(*p.difference) : json(nullptr)},
                   {"health", branch_health(p.branch)},
                   {"error", p.error}});
  const auto d = domain_of(c);
  r.summary = {{"scenario", "asymptotics"}, {"domain", {d.first, d.second}}, {"targets", c.targets}, {"branches", arr}};
  return r;
}

// ---------------------------------------------------------------- eigenloci

struct EigenPath {
  int ell = 0, k = 0;
  double onset_beta1 = 0;
  double onset_lambda_i = 0;  // Im lambda at the onset, lambda_R = 0
  std::optional<double> seed_lambda_r, seed_lambda_i;
  std::map<double, std::pair<double, double>> samples;  // beta1 -> (lambda_R, lambda_I)
  std::optional<double> fold;
  std::optional<double> min_lambda_r;  // over beta1 > onset + 0.1
  std::vector<double> lambda_r_crossings;  // beta1 where lambda_R changes sign, linear between points
  double reached_beta1 = 0;
  cont::Branch branch;
  std::string error;
};

struct EigenlociResult {
  std::vector<EigenPath> paths;
  json summary;
};

inline std::vector<std::pair<int, int>> eigen_path_indices(const std::vector<int>& ells) {
  std::vector<std::pair<int, int>> out;
  for (int ell : ells)
    for (int k = 0; k < ell; ++k) out.emplace_back(ell, k);
  return out;
}

/// Eigenvalue path for the embedded eigenvalue k born at beta1^(ell), from the
/// onset to beta1 = hi. Sampled at the configured targets.
inline EigenPath compute_eigen_path(const ScenarioConfig& c, int ell, int k, double hi) {
  EigenPath p;
  p.ell = ell;
  p.k = k;
  const auto& m = c.model;
  p.onset_beta1 = analytic::critical_coupling(m.omega, m.s, ell);
  const double kap = std::sqrt(m.s / m.omega) + ell;
  p.onset_lambda_i = m.omega * (kap - k) * (kap - k) - m.s;
  try {
    const auto h = cont::correct_branch_seed(m, ell, c.amplitude, mesh_of(c), c.newton).solution;
    auto seed = systems::eigen_seed(h, k);
    seed.parameters[systems::LAMBDA_I] = p.onset_lambda_i;
    auto sys = systems::eigen_system();
    systems::set_reference(sys, seed);
    auto ns = c.newton;
    ns.max_iterations = std::max(ns.max_iterations, 40);
    const auto start = bvp::solve_newton(sys, seed, ns).solution;
    p.seed_lambda_r = start.parameters[systems::LAMBDA_R];
    p.seed_lambda_i = start.parameters[systems::LAMBDA_I];
    auto cs = base_settings(c);
    cs.orient = v_growth;
    cs.target = hi;
    for (double t : c.targets)
      if (t < hi) cs.events.push_back(beta1_event(level_label(t), t));
    p.error = run_branch(sys, start, "beta1", cs, p.branch);
  } catch (const Error& e) {
    p.error = e.what();
  }
  auto lam = [](const CollocationSolution& s) {
    return std::make_pair(s.parameters[systems::LAMBDA_R], s.parameters[systems::LAMBDA_I]);
  };
  for (double t : c.targets)
    if (const auto* sp = find_special(p.branch, level_label(t))) p.samples[t] = lam(sp->location.solution);
  if (p.branch.stop_reason == "target") p.samples[hi] = lam(p.branch.points.back().solution);
  if (const auto* f = first_fold(p.branch)) p.fold = f->location.principal_value;
  for (const auto& q : p.branch.points) {
    const double b = beta1_of(q);
    if (b > p.onset_beta1 + 0.1) {
      const double lr = q.solution.parameters[systems::LAMBDA_R];
      p.min_lambda_r = p.min_lambda_r ? std::min(*p.min_lambda_r, lr) : lr;
    }
  }
  // no event here: the projection conditions degenerate at lambda_R = 0
  const auto& pts = p.branch.points;
  for (std::size_t i = 1; i < pts.size(); ++i) {
    const double a = pts[i - 1].solution.parameters[systems::LAMBDA_R];
    const double b = pts[i].solution.parameters[systems::LAMBDA_R];
    if ((a < 0) != (b < 0)) {
      const double ba = beta1_of(pts[i - 1]), bb = beta1_of(pts[i]);
      p.lambda_r_crossings.push_back(ba + (bb - ba) * a / (a - b));
    }
  }
  if (!p.branch.points.empty()) p.reached_beta1 = beta1_of(p.branch.points.back());
  return p;
}

inline std::string path_id(int ell, int k) { return "ell" + std::to_string(ell) + "_k" + std::to_string(k); }

/// CSV rows of a path: the analytic onset first, then the continued points.
inline std::vector<BranchRecordRow> eigen_path_rows(const EigenPath& p) {
  std::vector<BranchRecordRow> rows;
  BranchRecordRow onset;
  onset.step = 0;
  onset.beta1 = p.onset_beta1;
  onset.d1 = 0.0;
  onset.lambda_R = 0.0;
  onset.lambda_I = p.onset_lambda_i;
  onset.special = "onset";
  rows.push_back(onset);
  for (const auto& q : p.branch.points) rows.push_back(make_row(q.solution, q.step_index + 1, q.special));
  return rows;
}

inline EigenlociResult compute_eigenloci(const ScenarioConfig& c) {
  EigenlociResult r;
  const double hi = beta1_range_of(c).second;
  for (const auto& [ell, k] : eigen_path_indices(ells_of(c))) r.paths.push_back(compute_eigen_path(c, ell, k, hi));
  json arr = json::array();
  for (const auto& p : r.paths) {
    json samples = json::object();
    for (const auto& [b, l] : p.samples) samples[format_double(b)] = {l.first, l.second};
    json crossings = p.lambda_r_crossings;
    arr.push_back({{"id", path_id(p.ell, p.k)},
                   {"ell", p.ell},
                   {"k", p.k},
                   {"onset", {{"beta1", p.onset_beta1}, {"lambda_R", 0.0}, {"lambda_I", p.onset_lambda_i}}},
                   {"seed_lambda", p.seed_lambda_r ? json{*p.seed_lambda_r, *p.seed_lambda_i} : json(nullptr)},
                   {"fold_beta1", p.fold ? json(*p.fold) : json(nullptr)},
                   {"lambda_R_zero_crossings", crossings},
                   {"min_lambda_R_past_onset", p.min_lambda_r ? json(*p.min_lambda_r) : json(nullptr)},
                   {"samples", samples},
                   {"reached_beta1", p.reached_beta1},
                   {"health", branch_health(p.branch)},
                   {"error", p.error}});
  }
  r.summary = {{"scenario", "eigenloci"}, {"paths", arr}};
  return r;
}

// ------------------------------------------------------------------- geneig

struct GeneigRun {
  int run = 0;
  std::string varied, start, end;
  std::string status = "skipped";  // ok, failed, skipped
  std::string message;
  cont::Branch branch;
  std::optional<double> fold_beta1, fold_eps1;
};

struct GeneigResult {
  double c0 = 0.0;
  double measure = 1.0;
  std::string approach_error;
  cont::Branch approach;  // homoclinic branch from the pitchfork to A
  std::map<std::string, CollocationSolution> labeled;  // A, B, C1, D1, C2, D2
  std::vector<GeneigRun> runs;
  std::optional<CollocationSolution> fold_run3, fold_run5;
  std::optional<double> eta_difference;  // after sign alignment
  int eta_sign = 0;
  std::optional<systems::FredholmResult> fredholm;
  json summary;
};

/// Max-norm difference of the eta parts after choosing the sign that
/// minimizes it; returns (difference, sign).
inline std::pair<double, int> aligned_eta_difference(const CollocationSolution& a, const CollocationSolution& b) {
  const auto ea = a.values.bottomRows(4), eb = b.values.bottomRows(4);
  const double same = (ea - eb).cwiseAbs().maxCoeff(), flip = (ea + eb).cwiseAbs().maxCoeff();
  return same <= flip ? std::make_pair(same, 1) : std::make_pair(flip, -1);
}

inline int eps1_index_in_tangent(const CollocationSolution& s, const bvp::BvpSystem& sys, int principal) {
  const auto act = cont::continuation_active(sys, principal);
  for (std::size_t i = 0; i < act.size(); ++i)
    if (act[i] == systems::EPS1) return static_cast<int>(s.values.size() + i);
  throw DimensionError("eps1 is not active");
}

inline GeneigResult compute_geneig(const ScenarioConfig& c) {
  using namespace systems;
  GeneigResult r;
  const auto mesh = mesh_of(c);
  r.measure = unit_interval_measure(mesh);
  constexpr double beta_a = 20.0;
  constexpr int ell = 4;
  const std::set<int> wanted(c.runs.begin(), c.runs.end());

  // A: the ell = 4 homoclinic at beta1 = 20 between the pitchfork and the fold
  try {
    const auto seed = cont::correct_branch_seed(c.model, ell, c.amplitude, mesh, c.newton).solution;
    auto cs = base_settings(c);
    cs.orient = v_growth;
    cs.max_step = std::min(cs.max_step, 0.5);
    cs.events.push_back({"A",
                         [](const cont::BranchPoint& p) { return tangent_principal(p) < 0 ? beta1_of(p) - beta_a : 1.0; },
                         1e-10, true});
    auto sys = homoclinic_system();
    systems::set_reference(sys, seed);
    r.approach_error = run_branch(sys, seed, "beta1", cs, r.approach);
    if (r.approach.stop_reason != "target") throw Error("did not reach beta1 = 20 before the fold");
    r.labeled.emplace("A", geneig_seed(r.approach.points.back().solution, r.measure));
    r.c0 = r.labeled.at("A").parameters[C2];
  } catch (const Error& e) {
    r.approach_error = std::string("starting solution A: ") + e.what();
  }

  const auto gsys = geneig_system(r.measure);
  auto step = [&](int run, const std::string& varied, const std::string& from, const std::string& to,
                  const std::string& principal, cont::ContinuationSettings cs) {
    GeneigRun g;
    g.run = run;
    g.varied = varied;
    g.start = from;
    g.end = to;
    if (!wanted.count(run)) {
      r.runs.push_back(g);
      return;
    }
    if (!r.labeled.count(from)) {
      g.status = "failed";
      g.message = "starting solution " + from + " is not available";
      r.runs.push_back(g);
      return;
    }
    auto sys = gsys;
    const auto& st = r.labeled.at(from);
    systems::set_reference(sys, st);
    const std::string err = run_branch(sys, st, principal, cs, g.branch);
    if (!err.empty() || g.branch.stop_reason != "target") {
      g.status = "failed";
      g.message = err.empty() ? "stopped: " + g.branch.stop_reason : err;
    } else {
      g.status = "ok";
      r.labeled.insert_or_assign(to, g.branch.points.back().solution);
    }
    if (const auto* f = first_fold(g.branch)) {
      g.fold_beta1 = f->location.principal_value;
      g.fold_eps1 = f->location.solution.parameters[EPS1];
    }
    r.runs.push_back(std::move(g));
  };

  auto settings = [&](double max_step, bool folds) {
    auto cs = base_settings(c);
    cs.initial_step = std::min(0.01, max_step);
    cs.max_step = max_step;
    cs.min_step = std::min(cs.min_step, cs.initial_step);
    cs.detect_folds = folds;
    return cs;
  };
  // runs 3 and 5: 20 -> SN -> 20, ending at the second crossing of 20
  auto through_fold = [&] {
    auto cs = settings(0.2, true);
    cs.direction = -1;
    cs.fold_tolerance = std::min(cs.fold_tolerance, 1e-11);
    cs.events.push_back({"D",
                         [](const cont::BranchPoint& p) { return tangent_principal(p) > 0 ? beta1_of(p) - beta_a : -1.0; },
                         1e-10, true});
    return cs;
  };

  // run 1 starts at a fold of c1, so the first tangent is fixed by eps1 > 0
  {
    auto cs = settings(0.1, false);
    cs.target = 1.0;
    if (r.labeled.count("A")) {
      const int idx = eps1_index_in_tangent(r.labeled.at("A"), gsys, C1);
      cs.orient = [idx](const Eigen::VectorXd& t, const cont::BranchPoint&) { return t[idx]; };
    }
    step(1, "c1", "A", "B", "c1", cs);
  }
  {
    auto cs = settings(0.1, false);
    cs.target = 0.0;
    cs.direction = -1;
    step(2, "c2", "B", "C1", "c2", cs);
  }
  step(3, "beta1", "C1", "D1", "beta1", through_fold());
  {
    auto cs = settings(5.0, false);
    cs.target = 1.0;
    step(4, "eps2", "C1", "C2", "eps2", cs);
  }
  step(5, "beta1", "C2", "D2", "beta1", through_fold());

  for (const auto& g : r.runs) {
    const auto* f = first_fold(g.branch);
    if (!f) continue;
    if (g.run == 3) r.fold_run3 = f->location.solution;
    if (g.run == 5) r.fold_run5 = f->location.solution;
  }
  if (r.fold_run3 && r.fold_run5) {
    const auto [d, sg] = aligned_eta_difference(*r.fold_run3, *r.fold_run5);
    r.eta_difference = d;
    r.eta_sign = sg;
  }
  if (r.fold_run3)
    r.fredholm = fredholm_integrals(*r.fold_run3);
  else if (r.fold_run5)
    r.fredholm = fredholm_integrals(*r.fold_run5);

  json runs = json::array();
  for (const auto& g : r.runs) {
    json eps1 = json::array();
    for (const auto& p : g.branch.points) eps1.push_back({p.principal_value, p.solution.parameters[EPS1]});
    runs.push_back({{"run", g.run},
                    {"varied", g.varied},
                    {"start", g.start},
                    {"end", g.end},
                    {"status", g.status},
                    {"message", g.message},
                    {"fold_beta1", g.fold_beta1 ? json(*g.fold_beta1) : json(nullptr)},
                    {"fold_eps1", g.fold_eps1 ? json(*g.fold_eps1) : json(nullptr)},
                    {"specials", specials_json(g.branch)},
                    {"health", branch_health(g.branch)}});
  }
  json fred = nullptr;
  if (r.fredholm) {
    const double I1 = r.fredholm->I1, I2 = r.fredholm->I2;
    fred = {{"I1", I1},
            {"I2", I2},
            {"from_run", r.fold_run3 ? 3 : 5},
            {"first_equation", std::abs(I1) + std::abs(I2) > 0 ? "solvable iff alpha2 = 0" : "always solvable"},
            {"second_equation", "solvable iff I1 alpha1 + I2 alpha2 = 0"}};
  }
  r.summary = {{"scenario", "geneig"},
               {"integral_measure", r.measure},
               {"c0", r.c0},
               {"approach", {{"health", branch_health(r.approach)}, {"error", r.approach_error}}},
               {"runs", runs},
               {"fold_eta_difference", r.eta_difference ? json(*r.eta_difference) : json(nullptr)},
               {"fold_eta_sign", r.eta_sign},
               {"fredholm", fred}};
  return r;
}

// ------------------------------------------------------------------ writing

inline void write_diagram(const DiagramResult& r, const fs::path& dir) {
  write_csv(dir / "fundamental.csv", branch_rows(r.fundamental));
  for (const auto& b : r.branches) {
    const std::string id = "ell" + std::to_string(b.ell);
    write_csv(dir / (id + ".csv"), branch_rows(b.branch));
    for (const auto& s : b.branch.specials) write_snapshot(dir, id + "_" + s.label, s.location.solution);
  }
  write_json(dir / "summary.json", r.summary);
}

inline void write_asymptotics(const AsymptoticsResult& r, const fs::path& dir) {
  for (const auto& p : r.profiles) {
    const std::string id = "ell" + std::to_string(p.ell);
    write_csv(dir / (id + ".csv"), branch_rows(p.branch));
    for (const auto& [t, s] : p.scaled) {
      write_snapshot(dir, id + "_" + level_label(t) + "_scaled", s);
      write_snapshot(dir, id + "_" + level_label(t), p.raw.at(t));
    }
  }
  write_json(dir / "summary.json", r.summary);
}

inline void write_eigenloci(const EigenlociResult& r, const fs::path& dir) {
  for (const auto& p : r.paths) {
    write_csv(dir / (path_id(p.ell, p.k) + ".csv"), eigen_path_rows(p));
    for (const auto& s : p.branch.specials)
      if (s.kind == cont::SpecialKind::FOLD) write_snapshot(dir, path_id(p.ell, p.k) + "_" + s.label, s.location.solution);
  }
  write_json(dir / "summary.json", r.summary);
}

inline void write_geneig(const GeneigResult& r, const fs::path& dir) {
  write_csv(dir / "approach.csv", branch_rows(r.approach));
  for (const auto& g : r.runs)
    if (g.status != "skipped") write_csv(dir / ("run" + std::to_string(g.run) + ".csv"), branch_rows(g.branch));
  for (const auto& [name, s] : r.labeled) write_snapshot(dir, name, s);
  if (r.fold_run3) write_snapshot(dir, "SN_run3", *r.fold_run3);
  if (r.fold_run5) write_snapshot(dir, "SN_run5", *r.fold_run5);
  write_json(dir / "summary.json", r.summary);
}

// Public entry points: compute, write under out_dir/<scenario>, and throw with
// context when a branch failed.

inline DiagramResult run_diagram(const ScenarioConfig& c, const fs::path& out_dir) {
  auto r = compute_diagram(c);
  write_diagram(r, out_dir / "diagram");
  if (!r.fundamental_error.empty()) throw Error("diagram: fundamental branch: " + r.fundamental_error);
  for (const auto& b : r.branches)
    if (!b.error.empty()) throw Error("diagram: branch ell=" + std::to_string(b.ell) + ": " + b.error);
  return r;
}

inline AsymptoticsResult run_asymptotics(const ScenarioConfig& c, const fs::path& out_dir) {
  auto r = compute_asymptotics(c);
  write_asymptotics(r, out_dir / "asymptotics");
  for (const auto& p : r.profiles)
    if (!p.error.empty()) throw Error("asymptotics: branch ell=" + std::to_string(p.ell) + ": " + p.error);
  return r;
}

inline EigenlociResult run_eigenloci(const ScenarioConfig& c, const fs::path& out_dir) {
  auto r = compute_eigenloci(c);
  write_eigenloci(r, out_dir / "eigenloci");
  for (const auto& p : r.paths)
    if (!p.error.empty()) throw Error("eigenloci: path " + path_id(p.ell, p.k) + ": " + p.error);
  return r;
}

inline GeneigResult run_geneig(const ScenarioConfig& c, const fs::path& out_dir) {
  auto r = compute_geneig(c);
  write_geneig(r, out_dir / "geneig");
  if (!r.approach_error.empty()) throw Error("geneig: " + r.approach_error);
  for (const auto& g : r.runs)
    if (g.status == "failed") throw Error("geneig: run " + std::to_string(g.run) + ": " + g.message);
  return r;
}

}  // namespace cnls::runner
