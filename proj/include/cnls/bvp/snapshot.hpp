#pragma once

// JSON snapshot schema:
//   { "x_minus", "x_plus", "ntst", "ncol", "state_dim",
//     "mesh_nodes": [...], "points": [...],
//     "states": [[u_0 ... u_{n-1}] per point], "parameters": {name: value} }

#include <string>

#include <json.hpp>

#include "cnls/bvp/solution.hpp"

namespace cnls::bvp {

inline nlohmann::json snapshot_to_json(const CollocationSolution& sol) {
  nlohmann::json j;
  j["x_minus"] = sol.mesh.x_minus;
  j["x_plus"] = sol.mesh.x_plus;
  j["ntst"] = sol.mesh.interval_count;
  j["ncol"] = sol.mesh.collocation_degree;
  j["state_dim"] = sol.state_dim;
  j["mesh_nodes"] = sol.mesh.node_positions;
  j["points"] = sol.points();
  nlohmann::json states = nlohmann::json::array();
  for (int c = 0; c < sol.values.cols(); ++c) {
    std::vector<double> v(sol.values.col(c).data(), sol.values.col(c).data() + sol.state_dim);
    states.push_back(v);
  }
  j["states"] = std::move(states);
  nlohmann::json params = nlohmann::json::object();
  for (int i = 0; i < sol.parameters.size(); ++i) params[sol.parameters.names[i]] = sol.parameters[i];
  j["parameters"] = std::move(params);
  return j;
}

/// Parameter order follows `names`; each must be present in the snapshot.
inline CollocationSolution snapshot_from_json(const nlohmann::json& j, const std::vector<std::string>& names) {
  Mesh mesh;
  mesh.x_minus = j.at("x_minus").get<double>();
  mesh.x_plus = j.at("x_plus").get<double>();
  mesh.interval_count = j.at("ntst").get<int>();
  mesh.collocation_degree = j.at("ncol").get<int>();
  mesh.node_positions = j.at("mesh_nodes").get<std::vector<double>>();
  mesh.validate();
  const int n = j.at("state_dim").get<int>();
  CollocationSolution sol(mesh, n, ParameterSet(names));
  const auto& states = j.at("states");
  if (static_cast<int>(states.size()) != sol.point_count())
    throw DimensionError("snapshot: state count does not match mesh");
  for (int c = 0; c < sol.point_count(); ++c) {
    const auto v = states[c].get<std::vector<double>>();
    if (static_cast<int>(v.size()) != n) throw DimensionError("snapshot: state length mismatch");
    for (int k = 0; k < n; ++k) sol.values(k, c) = v[k];
  }
  for (const auto& nm : names) sol.parameters.set(nm, j.at("parameters").at(nm).get<double>());
  return sol;
}

}  // namespace cnls::bvp
