#pragma once

// z = (U, V, U', V'); z' = f(z) with the dummy parameter d1.

#include <memory>

#include <Eigen/Dense>

#include "cnls/bvp/system.hpp"
#include "cnls/systems/params.hpp"
#include "cnls/systems/projections.hpp"

namespace cnls::systems {

inline Eigen::Vector4d homoclinic_rhs(const Eigen::Ref<const Eigen::VectorXd>& z, const Eigen::VectorXd& p) {
  const double om = p[OMEGA], s = p[S], b1 = p[BETA1], b2 = p[BETA2], d1 = p[D1];
  const double U = z[0], V = z[1];
  Eigen::Vector4d f;
  f << z[2], z[3], om * U - (U * U + b1 * V * V) * U + d1 * z[2], s * V - (b1 * U * U + b2 * V * V) * V + d1 * z[3];
  return f;
}

inline Eigen::Matrix4d homoclinic_jac_state(const Eigen::Ref<const Eigen::VectorXd>& z, const Eigen::VectorXd& p) {
  const double om = p[OMEGA], s = p[S], b1 = p[BETA1], b2 = p[BETA2], d1 = p[D1];
  const double U = z[0], V = z[1];
  Eigen::Matrix4d J = Eigen::Matrix4d::Zero();
  J(0, 2) = 1;
  J(1, 3) = 1;
  J(2, 0) = om - 3 * U * U - b1 * V * V;
  J(2, 1) = -2 * b1 * U * V;
  J(2, 2) = d1;
  J(3, 0) = -2 * b1 * U * V;
  J(3, 1) = s - b1 * U * U - 3 * b2 * V * V;
  J(3, 3) = d1;
  return J;
}

/// 4 x PARAM_COUNT
inline Eigen::MatrixXd homoclinic_jac_params(const Eigen::Ref<const Eigen::VectorXd>& z) {
  const double U = z[0], V = z[1];
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(4, PARAM_COUNT);
  J(2, OMEGA) = U;
  J(3, S) = V;
  J(2, BETA1) = -V * V * U;
  J(3, BETA1) = -U * U * V;
  J(3, BETA2) = -V * V * V;
  J(2, D1) = z[2];
  J(3, D1) = z[3];
  return J;
}

/// (L^s z(x-), L^u z(x+))
inline Eigen::VectorXd homoclinic_bc(const Eigen::Ref<const Eigen::VectorXd>& za,
                                     const Eigen::Ref<const Eigen::VectorXd>& zb, const Eigen::VectorXd& p) {
  const auto L = homoclinic_projections(p[OMEGA], p[S], p[D1]);
  Eigen::VectorXd g(4);
  g << L.stable * za.head(4), L.unstable * zb.head(4);
  return g;
}

/// 4 x (2 n_state + PARAM_COUNT) Jacobian; z occupies the first four entries
/// of each end state of length n_state.
inline Eigen::MatrixXd homoclinic_bc_jac(const Eigen::Ref<const Eigen::VectorXd>& za,
                                         const Eigen::Ref<const Eigen::VectorXd>& zb, const Eigen::VectorXd& p,
                                         int n_state) {
  const auto L = homoclinic_projections(p[OMEGA], p[S], p[D1]);
  Eigen::MatrixXd G = Eigen::MatrixXd::Zero(4, 2 * n_state + PARAM_COUNT);
  G.block(0, 0, 2, 4) = L.stable;
  G.block(2, n_state, 2, 4) = L.unstable;
  for (int k : {OMEGA, S, D1}) {
    const auto dL = homoclinic_projections(p[OMEGA], p[S], p[D1], k);
    G.block(0, 2 * n_state + k, 2, 1) = dL.stable * za.head(4);
    G.block(2, 2 * n_state + k, 2, 1) = dL.unstable * zb.head(4);
  }
  return G;
}

/// Phase condition sum_{j=1,2} int (z_j - z*_j) z*_{j+2} dx.
inline bvp::IntegralCondition phase_condition_ic1(int n_state) {
  bvp::IntegralCondition ic;
  ic.name = "ic1";
  ic.uses_reference = true;
  ic.integrand = [](double, const Eigen::VectorXd& u, const Eigen::VectorXd& r, const Eigen::VectorXd&) {
    return (u[0] - r[0]) * r[2] + (u[1] - r[1]) * r[3];
  };
  ic.grad_state = [n_state](double, const Eigen::VectorXd&, const Eigen::VectorXd& r, const Eigen::VectorXd&) {
    Eigen::VectorXd g = Eigen::VectorXd::Zero(n_state);
    g[0] = r[2];
    g[1] = r[3];
    return g;
  };
  return ic;
}

/// The homoclinic BVP with d1 free. The reference for ic1 must be set
/// before solving.
inline bvp::BvpSystem homoclinic_system() {
  bvp::BvpSystem sys;
  sys.name = "homoclinic";
  sys.state_dim = 4;
  sys.parameter_names = parameter_names();
  sys.free_parameters = {"d1"};
  sys.rhs = [](double, const Eigen::VectorXd& z, const Eigen::VectorXd& p) -> Eigen::VectorXd {
    return homoclinic_rhs(z, p);
  };
  sys.rhs_jac_state = [](double, const Eigen::VectorXd& z, const Eigen::VectorXd& p) -> Eigen::MatrixXd {
    return homoclinic_jac_state(z, p);
  };
  sys.rhs_jac_params = [](double, const Eigen::VectorXd& z, const Eigen::VectorXd&) {
    return homoclinic_jac_params(z);
  };
  sys.bc_count = 4;
  sys.bc = [](const Eigen::VectorXd& a, const Eigen::VectorXd& b, const Eigen::VectorXd& p) {
    return homoclinic_bc(a, b, p);
  };
  sys.bc_jac = [](const Eigen::VectorXd& a, const Eigen::VectorXd& b, const Eigen::VectorXd& p) {
    return homoclinic_bc_jac(a, b, p, 4);
  };
  sys.integral_conditions.push_back(phase_condition_ic1(4));
  return sys;
}

inline void set_reference(bvp::BvpSystem& sys, const bvp::CollocationSolution& ref) {
  sys.reference = std::make_shared<const bvp::CollocationSolution>(ref);
}

}  // namespace cnls::systems
