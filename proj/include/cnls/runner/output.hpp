#pragma once

// Branch CSV rows, snapshots and summary files.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "cnls/bvp/snapshot.hpp"
#include "cnls/continuation/continuation.hpp"
#include "cnls/errors.hpp"
#include "cnls/systems/params.hpp"
#include "cnls/systems/seeds.hpp"

namespace cnls::runner {

namespace fs = std::filesystem;

struct BranchRecordRow {
  int step = 0;
  std::optional<double> beta1, d1, d2, lambda_R, lambda_I, eps1, eps2, c1, c2;
  std::optional<double> norm_U, norm_V, norm_eta, z_minus, z_plus;
  std::string special;
};

inline const std::vector<std::string>& csv_header() {
  static const std::vector<std::string> h = {"step",   "beta1",  "d1",       "d2",      "lambda_R", "lambda_I",
                                             "eps1",   "eps2",   "c1",       "c2",      "norm_U",   "norm_V",
                                             "norm_eta", "z_minus", "z_plus", "special"};
  return h;
}

inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::string format_row(const BranchRecordRow& r) {
  std::string out = std::to_string(r.step);
  auto add = [&](const std::optional<double>& v) {
    out += ',';
    if (v) out += format_double(*v);
  };
  for (const auto* v : {&r.beta1, &r.d1, &r.d2, &r.lambda_R, &r.lambda_I, &r.eps1, &r.eps2, &r.c1, &r.c2,
                        &r.norm_U, &r.norm_V, &r.norm_eta, &r.z_minus, &r.z_plus})
    add(*v);
  out += ',';
  out += r.special;
  return out;
}

/// Row of a converged solution. Which parameter columns are filled depends on
/// the system the solution belongs to (state dimension 4, 20 or 8).
inline BranchRecordRow make_row(const bvp::CollocationSolution& sol, int step, const std::string& special = {}) {
  using namespace systems;
  const auto& p = sol.parameters;
  const auto d = diagnostics(sol);
  BranchRecordRow r;
  r.step = step;
  r.special = special;
  r.beta1 = p[BETA1];
  r.d1 = p[D1];
  r.norm_U = d.norm_U;
  r.norm_V = d.norm_V;
  r.z_minus = d.z_minus;
  r.z_plus = d.z_plus;
  if (sol.state_dim == EIGEN_STATE_DIM) {
    r.lambda_R = p[LAMBDA_R];
    r.lambda_I = p[LAMBDA_I];
    r.norm_eta = d.norm_eta;
  } else if (sol.state_dim == GENEIG_STATE_DIM) {
    r.d2 = p[D2];
    r.eps1 = p[EPS1];
    r.eps2 = p[EPS2];
    r.c1 = p[C1];
    r.c2 = p[C2];
    r.norm_eta = d.norm_eta;
  }
  return r;
}

inline std::vector<BranchRecordRow> branch_rows(const cont::Branch& br) {
  std::vector<BranchRecordRow> rows;
  rows.reserve(br.points.size());
  for (const auto& p : br.points) rows.push_back(make_row(p.solution, p.step_index, p.special));
  return rows;
}

inline void write_csv(const fs::path& path, const std::vector<BranchRecordRow>& rows) {
  fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  const auto& h = csv_header();
  for (std::size_t i = 0; i < h.size(); ++i) out << (i ? "," : "") << h[i];
  out << '\n';
  for (const auto& r : rows) out << format_row(r) << '\n';
}

inline void write_json(const fs::path& path, const nlohmann::json& j) {
  fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << j.dump(2) << '\n';
}

inline void write_snapshot(const fs::path& dir, const std::string& name, const bvp::CollocationSolution& sol) {
  write_json(dir / "snapshots" / (name + ".json"), bvp::snapshot_to_json(sol));
}

/// Largest |z(x-)|, |z(x+)| over a branch.
inline double worst_boundary(const cont::Branch& br) {
  double w = 0;
  for (const auto& p : br.points) {
    const auto d = systems::diagnostics(p.solution);
    w = std::max({w, d.z_minus, d.z_plus});
  }
  return w;
}

/// Largest |d1|, |d2| over a branch.
inline double worst_dummy(const cont::Branch& br) {
  double w = 0;
  for (const auto& p : br.points) {
    w = std::max(w, std::abs(p.solution.parameters[systems::D1]));
    w = std::max(w, std::abs(p.solution.parameters[systems::D2]));
  }
  return w;
}

inline nlohmann::json specials_json(const cont::Branch& br) {
  auto arr = nlohmann::json::array();
  for (const auto& s : br.specials)
    arr.push_back({{"label", s.label},
                   {"kind", cont::to_string(s.kind)},
                   {"beta1", s.location.solution.parameters[systems::BETA1]},
                   {"principal", s.location.principal},
                   {"principal_value", s.location.principal_value},
                   {"step", s.location.step_index},
                   {"detector", s.detector_value},
                   {"bisections", s.bisections}});
  return arr;
}

}  // namespace cnls::runner
