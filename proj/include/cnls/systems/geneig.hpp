#pragma once

// State (z, eta) in R^8 with eta = (psi_1, psi_2, psi_1', psi_2'). The eta part
// solves the linearization forced by eps1((1 - eps2) U, eps2 V) plus the
// dummy term d2 (z3, z4).

#include <Eigen/Dense>

#include "cnls/bvp/system.hpp"
#include "cnls/systems/homoclinic.hpp"
#include "cnls/systems/params.hpp"
#include "cnls/systems/projections.hpp"

namespace cnls::systems {

constexpr int GENEIG_STATE_DIM = 8;
constexpr int ETA = 4;

inline Eigen::VectorXd geneig_rhs(const Eigen::VectorXd& u, const Eigen::VectorXd& p) {
  const double om = p[OMEGA], s = p[S], b1 = p[BETA1], b2 = p[BETA2];
  const double e1 = p[EPS1], e2 = p[EPS2], d2 = p[D2];
  const double U = u[0], V = u[1];
  const double h1 = u[ETA], h2 = u[ETA + 1];
  Eigen::VectorXd f(GENEIG_STATE_DIM);
  f.head<4>() = homoclinic_rhs(u.head<4>(), p);
  f[ETA] = u[ETA + 2];
  f[ETA + 1] = u[ETA + 3];
  f[ETA + 2] = om * h1 - (3 * U * U + b1 * V * V) * h1 - 2 * b1 * U * V * h2 + e1 * (1 - e2) * U + d2 * u[2];
  f[ETA + 3] = s * h2 - 2 * b1 * U * V * h1 - (b1 * U * U + 3 * b2 * V * V) * h2 + e1 * e2 * V + d2 * u[3];
  return f;
}

inline Eigen::MatrixXd geneig_jac_state(const Eigen::VectorXd& u, const Eigen::VectorXd& p) {
  const double om = p[OMEGA], s = p[S], b1 = p[BETA1], b2 = p[BETA2];
  const double e1 = p[EPS1], e2 = p[EPS2], d2 = p[D2];
  const double U = u[0], V = u[1];
  const double h1 = u[ETA], h2 = u[ETA + 1];
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(GENEIG_STATE_DIM, GENEIG_STATE_DIM);
  J.topLeftCorner<4, 4>() = homoclinic_jac_state(u.head<4>(), p);
  J(ETA, ETA + 2) = 1;
  J(ETA + 1, ETA + 3) = 1;
  J(ETA + 2, 0) = -6 * U * h1 - 2 * b1 * V * h2 + e1 * (1 - e2);
  J(ETA + 2, 1) = -2 * b1 * V * h1 - 2 * b1 * U * h2;
  J(ETA + 2, 2) = d2;
  J(ETA + 2, ETA) = om - 3 * U * U - b1 * V * V;
  J(ETA + 2, ETA + 1) = -2 * b1 * U * V;
  J(ETA + 3, 0) = -2 * b1 * V * h1 - 2 * b1 * U * h2;
  J(ETA + 3, 1) = -2 * b1 * U * h1 - 6 * b2 * V * h2 + e1 * e2;
  J(ETA + 3, 3) = d2;
  J(ETA + 3, ETA) = -2 * b1 * U * V;
  J(ETA + 3, ETA + 1) = s - b1 * U * U - 3 * b2 * V * V;
  return J;
}

inline Eigen::MatrixXd geneig_jac_params(const Eigen::VectorXd& u, const Eigen::VectorXd& p) {
  const double e1 = p[EPS1], e2 = p[EPS2];
  const double U = u[0], V = u[1];
  const double h1 = u[ETA], h2 = u[ETA + 1];
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(GENEIG_STATE_DIM, PARAM_COUNT);
  J.topRows<4>() = homoclinic_jac_params(u.head<4>());
  J(ETA + 2, OMEGA) = h1;
  J(ETA + 3, S) = h2;
  J(ETA + 2, BETA1) = -V * V * h1 - 2 * U * V * h2;
  J(ETA + 3, BETA1) = -2 * U * V * h1 - U * U * h2;
  J(ETA + 3, BETA2) = -3 * V * V * h2;
  J(ETA + 2, D2) = u[2];
  J(ETA + 3, D2) = u[3];
  J(ETA + 2, EPS1) = (1 - e2) * U;
  J(ETA + 3, EPS1) = e2 * V;
  J(ETA + 2, EPS2) = -e1 * U;
  J(ETA + 3, EPS2) = e1 * V;
  return J;
}

inline Eigen::VectorXd geneig_bc(const Eigen::VectorXd& ua, const Eigen::VectorXd& ub, const Eigen::VectorXd& p) {
  const auto L = hat_projections(p);
  Eigen::VectorXd g(GENEIG_STATE_DIM);
  g << L.stable * ua, L.unstable * ub;
  return g;
}

inline Eigen::MatrixXd geneig_bc_jac(const Eigen::VectorXd& ua, const Eigen::VectorXd& ub,
                                     const Eigen::VectorXd& p) {
  const int n = GENEIG_STATE_DIM;
  const auto L = hat_projections(p);
  Eigen::MatrixXd G = Eigen::MatrixXd::Zero(n, 2 * n + PARAM_COUNT);
  G.block(0, 0, 4, n) = L.stable;
  G.block(4, n, 4, n) = L.unstable;
  for (int k : {OMEGA, S, D1, D2, EPS1, EPS2}) {
    const auto dL = hat_projections(p, k);
    G.block(0, 2 * n + k, 4, 1) = dL.stable * ua;
    G.block(4, 2 * n + k, 4, 1) = dL.unstable * ub;
  }
  return G;
}

/// int (eta_1^2 + eta_2^2) dx - c1
inline bvp::IntegralCondition geneig_ic3(double measure = 1.0) {
  bvp::IntegralCondition ic;
  ic.name = "ic3";
  ic.subtract_parameter = C1;
  ic.integrand = [measure](double, const Eigen::VectorXd& u, const Eigen::VectorXd&, const Eigen::VectorXd&) {
    return measure * (u[ETA] * u[ETA] + u[ETA + 1] * u[ETA + 1]);
  };
  ic.grad_state = [measure](double, const Eigen::VectorXd& u, const Eigen::VectorXd&, const Eigen::VectorXd&) {
    Eigen::VectorXd g = Eigen::VectorXd::Zero(GENEIG_STATE_DIM);
    g[ETA] = 2 * measure * u[ETA];
    g[ETA + 1] = 2 * measure * u[ETA + 1];
    return g;
  };
  return ic;
}

/// int (eta_1 z_3 + eta_2 z_4) dx - c2
inline bvp::IntegralCondition geneig_ic4(double measure = 1.0) {
  bvp::IntegralCondition ic;
  ic.name = "ic4";
  ic.subtract_parameter = C2;
  ic.integrand = [measure](double, const Eigen::VectorXd& u, const Eigen::VectorXd&, const Eigen::VectorXd&) {
    return measure * (u[ETA] * u[2] + u[ETA + 1] * u[3]);
  };
  ic.grad_state = [measure](double, const Eigen::VectorXd& u, const Eigen::VectorXd&, const Eigen::VectorXd&) {
    Eigen::VectorXd g = Eigen::VectorXd::Zero(GENEIG_STATE_DIM);
    g[2] = measure * u[ETA];
    g[3] = measure * u[ETA + 1];
    g[ETA] = measure * u[2];
    g[ETA + 1] = measure * u[3];
    return g;
  };
  return ic;
}

/// 1 / (x+ - x-): integrals taken over the domain rescaled to [0, 1].
inline double unit_interval_measure(const bvp::Mesh& mesh) {
  return 1.0 / (mesh.node_positions.back() - mesh.node_positions.front());
}

/// Generalized-eigenfunction BVP with eps1, d1, d2 free. `measure` scales the
/// integrands of ic3 and ic4.
inline bvp::BvpSystem geneig_system(double measure = 1.0) {
  bvp::BvpSystem sys;
  sys.name = "geneig";
  sys.state_dim = GENEIG_STATE_DIM;
  sys.parameter_names = parameter_names();
  sys.free_parameters = {"eps1", "d1", "d2"};
  sys.rhs = [](double, const Eigen::VectorXd& u, const Eigen::VectorXd& p) { return geneig_rhs(u, p); };
  sys.rhs_jac_state = [](double, const Eigen::VectorXd& u, const Eigen::VectorXd& p) {
    return geneig_jac_state(u, p);
  };
  sys.rhs_jac_params = [](double, const Eigen::VectorXd& u, const Eigen::VectorXd& p) {
    return geneig_jac_params(u, p);
  };
  sys.bc_count = GENEIG_STATE_DIM;
  sys.bc = geneig_bc;
  sys.bc_jac = geneig_bc_jac;
  sys.integral_conditions.push_back(phase_condition_ic1(GENEIG_STATE_DIM));
  sys.integral_conditions.push_back(geneig_ic3(measure));
  sys.integral_conditions.push_back(geneig_ic4(measure));
  return sys;
}

}  // namespace cnls::systems
