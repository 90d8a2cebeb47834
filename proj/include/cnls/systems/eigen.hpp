#pragma once

// State (z, zeta_R, zeta_I) in R^20, zeta = (psi_1..4, psi_1'..4'). The z part
// is the homoclinic system; zeta solves the linearized eigenvalue problem with
// lambda = lambda_R + i lambda_I.

#include <Eigen/Dense>

#include "cnls/bvp/system.hpp"
#include "cnls/systems/homoclinic.hpp"
#include "cnls/systems/params.hpp"
#include "cnls/systems/projections.hpp"

namespace cnls::systems {

constexpr int EIGEN_STATE_DIM = 20;
constexpr int ZETA_R = 4;
constexpr int ZETA_I = 12;

/// Coefficients of the psi'' map: A1 (symmetric 2x2), A2 = diag(b11, b22), lambda.
struct EigenCoefficients {
  double a11 = 0, a12 = 0, a22 = 0, b11 = 0, b22 = 0, lr = 0, li = 0;
};

inline EigenCoefficients eigen_coefficients(double U, double V, const Eigen::VectorXd& p) {
  const double om = p[OMEGA], s = p[S], b1 = p[BETA1], b2 = p[BETA2];
  EigenCoefficients c;
  c.a11 = om - 3 * U * U - b1 * V * V;
  c.a12 = -2 * b1 * U * V;
  c.a22 = s - b1 * U * U - 3 * b2 * V * V;
  c.b11 = om - U * U - b1 * V * V;
  c.b22 = s - b1 * U * U - b2 * V * V;
  c.lr = p[LAMBDA_R];
  c.li = p[LAMBDA_I];
  return c;
}

/// Derivative of the coefficients with respect to U (which = 0), V (which = 1).
inline EigenCoefficients eigen_coefficients_dstate(double U, double V, const Eigen::VectorXd& p, int which) {
  const double b1 = p[BETA1], b2 = p[BETA2];
  EigenCoefficients c;
  if (which == 0) {
    c.a11 = -6 * U;
    c.a12 = -2 * b1 * V;
    c.a22 = -2 * b1 * U;
    c.b11 = -2 * U;
    c.b22 = -2 * b1 * U;
  } else {
    c.a11 = -2 * b1 * V;
    c.a12 = -2 * b1 * U;
    c.a22 = -6 * b2 * V;
    c.b11 = -2 * b1 * V;
    c.b22 = -2 * b2 * V;
  }
  return c;
}

inline EigenCoefficients eigen_coefficients_dparam(double U, double V, int which) {
  EigenCoefficients c;
  switch (which) {
    case OMEGA: c.a11 = c.b11 = 1; break;
    case S: c.a22 = c.b22 = 1; break;
    case BETA1:
      c.a11 = -V * V;
      c.a12 = -2 * U * V;
      c.a22 = -U * U;
      c.b11 = -V * V;
      c.b22 = -U * U;
      break;
    case BETA2:
      c.a22 = -3 * V * V;
      c.b22 = -V * V;
      break;
    case LAMBDA_R: c.lr = 1; break;
    case LAMBDA_I: c.li = 1; break;
    default: break;
  }
  return c;
}

/// (psi_R'', psi_I'') from (psi_R, psi_I); linear in both the coefficients and psi.
inline void psi_second_derivative(const EigenCoefficients& c, const Eigen::Ref<const Eigen::Vector4d>& pr,
                                  const Eigen::Ref<const Eigen::Vector4d>& pi, Eigen::Ref<Eigen::Vector4d> out_r,
                                  Eigen::Ref<Eigen::Vector4d> out_i) {
  out_r[0] = c.a11 * pr[0] + c.a12 * pr[1] + c.lr * pr[2] - c.li * pi[2];
  out_r[1] = c.a12 * pr[0] + c.a22 * pr[1] + c.lr * pr[3] - c.li * pi[3];
  out_r[2] = -c.lr * pr[0] + c.b11 * pr[2] + c.li * pi[0];
  out_r[3] = -c.lr * pr[1] + c.b22 * pr[3] + c.li * pi[1];
  out_i[0] = c.li * pr[2] + c.a11 * pi[0] + c.a12 * pi[1] + c.lr * pi[2];
  out_i[1] = c.li * pr[3] + c.a12 * pi[0] + c.a22 * pi[1] + c.lr * pi[3];
  out_i[2] = -c.li * pr[0] - c.lr * pi[0] + c.b11 * pi[2];
  out_i[3] = -c.li * pr[1] - c.lr * pi[1] + c.b22 * pi[3];
}

namespace detail {

// zeta-part of the rhs for given coefficients
inline void zeta_rhs(const EigenCoefficients& c, const Eigen::VectorXd& u, Eigen::Ref<Eigen::VectorXd> f) {
  const Eigen::Vector4d pr = u.segment<4>(ZETA_R), pi = u.segment<4>(ZETA_I);
  f.segment<4>(ZETA_R) = u.segment<4>(ZETA_R + 4);
  f.segment<4>(ZETA_I) = u.segment<4>(ZETA_I + 4);
  Eigen::Vector4d r, i;
  psi_second_derivative(c, pr, pi, r, i);
  f.segment<4>(ZETA_R + 4) = r;
  f.segment<4>(ZETA_I + 4) = i;
}

}  // namespace detail

inline Eigen::VectorXd eigen_rhs(const Eigen::VectorXd& u, const Eigen::VectorXd& p) {
  Eigen::VectorXd f(EIGEN_STATE_DIM);
  f.head<4>() = homoclinic_rhs(u.head<4>(), p);
  detail::zeta_rhs(eigen_coefficients(u[0], u[1], p), u, f);
  return f;
}

inline Eigen::MatrixXd eigen_jac_state(const Eigen::VectorXd& u, const Eigen::VectorXd& p) {
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(EIGEN_STATE_DIM, EIGEN_STATE_DIM);
  J.topLeftCorner<4, 4>() = homoclinic_jac_state(u.head<4>(), p);
  const auto c = eigen_coefficients(u[0], u[1], p);
  const Eigen::Vector4d pr = u.segment<4>(ZETA_R), pi = u.segment<4>(ZETA_I);
  Eigen::Vector4d r, i;
  for (int k = 0; k < 4; ++k) {
    J(ZETA_R + k, ZETA_R + 4 + k) = 1;
    J(ZETA_I + k, ZETA_I + 4 + k) = 1;
    const Eigen::Vector4d e = Eigen::Vector4d::Unit(k), zero = Eigen::Vector4d::Zero();
    psi_second_derivative(c, e, zero, r, i);
    J.block<4, 1>(ZETA_R + 4, ZETA_R + k) = r;
    J.block<4, 1>(ZETA_I + 4, ZETA_R + k) = i;
    psi_second_derivative(c, zero, e, r, i);
    J.block<4, 1>(ZETA_R + 4, ZETA_I + k) = r;
    J.block<4, 1>(ZETA_I + 4, ZETA_I + k) = i;
  }
  for (int k = 0; k < 2; ++k) {
    psi_second_derivative(eigen_coefficients_dstate(u[0], u[1], p, k), pr, pi, r, i);
    J.block<4, 1>(ZETA_R + 4, k) = r;
    J.block<4, 1>(ZETA_I + 4, k) = i;
  }
  return J;
}

inline Eigen::MatrixXd eigen_jac_params(const Eigen::VectorXd& u, const Eigen::VectorXd& p) {
  (void)p;
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(EIGEN_STATE_DIM, PARAM_COUNT);
  J.topRows<4>() = homoclinic_jac_params(u.head<4>());
  const Eigen::Vector4d pr = u.segment<4>(ZETA_R), pi = u.segment<4>(ZETA_I);
  Eigen::Vector4d r, i;
  for (int k : {OMEGA, S, BETA1, BETA2, LAMBDA_R, LAMBDA_I}) {
    psi_second_derivative(eigen_coefficients_dparam(u[0], u[1], k), pr, pi, r, i);
    J.block<4, 1>(ZETA_R + 4, k) = r;
    J.block<4, 1>(ZETA_I + 4, k) = i;
  }
  return J;
}

namespace detail {

inline Eigen::VectorXd zeta_of(const Eigen::VectorXd& u) { return u.segment<16>(ZETA_R); }

}  // namespace detail

/// 20 rows: homoclinic part, then L~^s zeta(x-), L~^u zeta(x+).
inline Eigen::VectorXd eigen_bc(const Eigen::VectorXd& ua, const Eigen::VectorXd& ub, const Eigen::VectorXd& p) {
  const auto rd = rho_delta(p[OMEGA], p[S], p[LAMBDA_R], p[LAMBDA_I]);
  check_nondegenerate(rd);
  const auto L = tilde_projections(rd);
  Eigen::VectorXd g(EIGEN_STATE_DIM);
  g.head<4>() = homoclinic_bc(ua.head<4>(), ub.head<4>(), p);
  g.segment<8>(4) = L.stable * detail::zeta_of(ua);
  g.segment<8>(12) = L.unstable * detail::zeta_of(ub);
  return g;
}

inline Eigen::MatrixXd eigen_bc_jac(const Eigen::VectorXd& ua, const Eigen::VectorXd& ub, const Eigen::VectorXd& p) {
  const int n = EIGEN_STATE_DIM;
  const auto rd = rho_delta(p[OMEGA], p[S], p[LAMBDA_R], p[LAMBDA_I]);
  check_nondegenerate(rd);
  const auto L = tilde_projections(rd);
  Eigen::MatrixXd G = Eigen::MatrixXd::Zero(n, 2 * n + PARAM_COUNT);
  G.topRows<4>() = homoclinic_bc_jac(ua.head<4>(), ub.head<4>(), p, n);
  G.block(4, ZETA_R, 8, 16) = L.stable;
  G.block(12, n + ZETA_R, 8, 16) = L.unstable;
  const Eigen::VectorXd za = detail::zeta_of(ua), zb = detail::zeta_of(ub);
  for (int k : {OMEGA, S, LAMBDA_R, LAMBDA_I}) {
    const auto dL = tilde_projections(rho_delta_derivative(rd, k), false);
    G.block(4, 2 * n + k, 8, 1) += dL.stable * za;
    G.block(12, 2 * n + k, 8, 1) += dL.unstable * zb;
  }
  return G;
}

/// The two real integrals of int (zeta - zeta*) conj(zeta*) dx over psi_1..4.
inline bvp::IntegralCondition eigen_phase_ic2(bool imaginary_part) {
  bvp::IntegralCondition ic;
  ic.name = imaginary_part ? "ic2b" : "ic2a";
  ic.uses_reference = true;
  if (!imaginary_part) {
    ic.integrand = [](double, const Eigen::VectorXd& u, const Eigen::VectorXd& r, const Eigen::VectorXd&) {
      double v = 0;
      for (int j = 0; j < 4; ++j)
        v += (u[ZETA_R + j] - r[ZETA_R + j]) * r[ZETA_R + j] + (u[ZETA_I + j] - r[ZETA_I + j]) * r[ZETA_I + j];
      return v;
    };
    ic.grad_state = [](double, const Eigen::VectorXd&, const Eigen::VectorXd& r, const Eigen::VectorXd&) {
      Eigen::VectorXd g = Eigen::VectorXd::Zero(EIGEN_STATE_DIM);
      for (int j = 0; j < 4; ++j) {
        g[ZETA_R + j] = r[ZETA_R + j];
        g[ZETA_I + j] = r[ZETA_I + j];
      }
      return g;
    };
  } else {
    ic.integrand = [](double, const Eigen::VectorXd& u, const Eigen::VectorXd& r, const Eigen::VectorXd&) {
      double v = 0;
      for (int j = 0; j < 4; ++j)
        v += (u[ZETA_I + j] - r[ZETA_I + j]) * r[ZETA_R + j] - (u[ZETA_R + j] - r[ZETA_R + j]) * r[ZETA_I + j];
      return v;
    };
    ic.grad_state = [](double, const Eigen::VectorXd&, const Eigen::VectorXd& r, const Eigen::VectorXd&) {
      Eigen::VectorXd g = Eigen::VectorXd::Zero(EIGEN_STATE_DIM);
      for (int j = 0; j < 4; ++j) {
        g[ZETA_I + j] = r[ZETA_R + j];
        g[ZETA_R + j] = -r[ZETA_I + j];
      }
      return g;
    };
  }
  return ic;
}

/// Eigenvalue BVP with d1, lambda_R, lambda_I free.
inline bvp::BvpSystem eigen_system() {
  bvp::BvpSystem sys;
  sys.name = "eigen";
  sys.state_dim = EIGEN_STATE_DIM;
  sys.parameter_names = parameter_names();
  sys.free_parameters = {"d1", "lambda_R", "lambda_I"};
  sys.rhs = [](double, const Eigen::VectorXd& u, const Eigen::VectorXd& p) { return eigen_rhs(u, p); };
  sys.rhs_jac_state = [](double, const Eigen::VectorXd& u, const Eigen::VectorXd& p) {
    return eigen_jac_state(u, p);
  };
  sys.rhs_jac_params = [](double, const Eigen::VectorXd& u, const Eigen::VectorXd& p) {
    return eigen_jac_params(u, p);
  };
  sys.bc_count = EIGEN_STATE_DIM;
  sys.bc = eigen_bc;
  sys.bc_jac = eigen_bc_jac;
  sys.integral_conditions.push_back(phase_condition_ic1(EIGEN_STATE_DIM));
  sys.integral_conditions.push_back(eigen_phase_ic2(false));
  sys.integral_conditions.push_back(eigen_phase_ic2(true));
  return sys;
}

}  // namespace cnls::systems
