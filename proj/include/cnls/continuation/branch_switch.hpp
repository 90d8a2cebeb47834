#pragma once

// Seeding of the bifurcated homoclinic branches at beta1^(ell): the guess
// (U0, a V1) is corrected with beta1 free and the amplitude condition
// int V V1 dx = a int V1^2 dx.

#include <cmath>

#include <Eigen/Dense>

#include "cnls/analytic/formulas.hpp"
#include "cnls/bvp/newton.hpp"
#include "cnls/systems/homoclinic.hpp"
#include "cnls/systems/seeds.hpp"

namespace cnls::cont {

inline bvp::CollocationSolution branch_switch_seed(const analytic::ModelParams& model, int ell, double amplitude,
                                                   const bvp::Mesh& mesh) {
  return systems::branch_seed(model, ell, amplitude, mesh);
}

/// Amplitude condition int (V - a V1) V1 dx = 0 with beta1 as extra unknown.
inline bvp::ExtraEquations amplitude_condition(const analytic::ModelParams& model, int ell, double amplitude) {
  bvp::ExtraEquations e;
  e.unknowns = {systems::BETA1};
  e.count = 1;
  const double om = model.omega, s = model.s;
  e.evaluate = [om, s, ell, amplitude](const bvp::CollocationSolution& sol, const std::vector<int>&,
                                       Eigen::VectorXd& r, Eigen::MatrixXd& rows) {
    const int n = sol.state_dim, m = sol.mesh.collocation_degree;
    const auto& tab = bvp::CollocationTables::get(m);
    const bool want_rows = rows.size() > 0;
    if (want_rows) rows.row(0).setZero();
    double acc = 0;
    for (int i = 0; i < sol.mesh.interval_count; ++i) {
      const double h = sol.mesh.width(i);
      const auto coeff = sol.interval_coefficients(i);
      for (int c = 0; c < m; ++c) {
        const double x = sol.mesh.node_positions[i] + h * tab.gauss.nodes[c];
        const double v1 = analytic::kernel_mode_V1(x, om, s, ell);
        const double wq = h * tab.gauss.weights[c];
        const double v = coeff.row(1).dot(tab.basis.row(c));
        acc += wq * (v - amplitude * v1) * v1;
        if (want_rows)
          for (int j = 0; j <= m; ++j) rows(0, (i * m + j) * n + 1) += wq * v1 * tab.basis(c, j);
      }
    }
    r.resize(1);
    r[0] = acc;
  };
  return e;
}

/// Newton correction of the seed with d1 and beta1 free.
inline bvp::NewtonResult correct_branch_seed(const analytic::ModelParams& model, int ell, double amplitude,
                                             const bvp::Mesh& mesh, const bvp::NewtonSettings& ns = {}) {
  auto seed = branch_switch_seed(model, ell, amplitude, mesh);
  auto sys = systems::homoclinic_system();
  systems::set_reference(sys, seed);
  const auto extra = amplitude_condition(model, ell, amplitude);
  return bvp::solve_newton(sys, seed, ns, &extra);
}

}  // namespace cnls::cont
