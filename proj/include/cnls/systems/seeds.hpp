#pragma once

// Starting data for the three systems and the monitored diagnostics.

#include <cmath>

#include <Eigen/Dense>

#include "cnls/analytic/formulas.hpp"
#include "cnls/bvp/solution.hpp"
#include "cnls/systems/eigen.hpp"
#include "cnls/systems/geneig.hpp"
#include "cnls/systems/homoclinic.hpp"
#include "cnls/systems/params.hpp"

namespace cnls::systems {

namespace detail {

// fourth-order centered difference
template <class F>
double derivative(const F& f, double x, double h = 1e-3) {
  return (8 * (f(x + h) - f(x - h)) - (f(x + 2 * h) - f(x - 2 * h))) / (12 * h);
}

}  // namespace detail

/// (U0, 0, U0', 0) at the given model parameters, d1 = 0.
inline bvp::CollocationSolution fundamental_seed(const analytic::ModelParams& model, const bvp::Mesh& mesh) {
  bvp::CollocationSolution sol(mesh, 4, make_parameters(model));
  const double om = model.omega;
  sol.sample([om](double x) {
    Eigen::VectorXd z = Eigen::VectorXd::Zero(4);
    z[0] = analytic::fundamental_profile(x, om);
    z[2] = analytic::fundamental_profile_dx(x, om);
    return z;
  });
  return sol;
}

/// (U0, a V1, U0', a V1') with beta1 at the onset value of mode ell.
inline bvp::CollocationSolution branch_seed(const analytic::ModelParams& model, int ell, double amplitude,
                                            const bvp::Mesh& mesh) {
  analytic::ModelParams m = model;
  m.beta1 = analytic::critical_coupling(model.omega, model.s, ell);
  auto sol = fundamental_seed(m, mesh);
  auto v1 = [&](double x) { return analytic::kernel_mode_V1(x, m.omega, m.s, ell); };
  for (int j = 0; j < sol.point_count(); ++j) {
    const double x = sol.point(j);
    sol.values(1, j) = amplitude * v1(x);
    sol.values(3, j) = amplitude * detail::derivative(v1, x);
  }
  return sol;
}

/// The three kernel states of the linearization at lambda = 0 on a
/// homoclinic solution: 1 translation, 2 gauge in U, 3 gauge in V.
inline bvp::CollocationSolution kernel_state(const bvp::CollocationSolution& homoclinic, int which) {
  if (homoclinic.state_dim != 4) throw DimensionError("kernel_state: need a homoclinic solution");
  if (which < 1 || which > 3) throw DomainError("kernel_state: which must be 1, 2 or 3");
  bvp::CollocationSolution sol(homoclinic.mesh, EIGEN_STATE_DIM, homoclinic.parameters);
  sol.parameters[LAMBDA_R] = 0;
  sol.parameters[LAMBDA_I] = 0;
  for (int j = 0; j < sol.point_count(); ++j) {
    const Eigen::VectorXd z = homoclinic.values.col(j);
    const Eigen::Vector4d f = homoclinic_rhs(z, homoclinic.parameters.values);
    Eigen::VectorXd u = Eigen::VectorXd::Zero(EIGEN_STATE_DIM);
    u.head<4>() = z;
    switch (which) {
      case 1:
        u[ZETA_R] = z[2];
        u[ZETA_R + 1] = z[3];
        u[ZETA_R + 4] = f[2];
        u[ZETA_R + 5] = f[3];
        break;
      case 2:
        u[ZETA_R + 2] = z[0];
        u[ZETA_R + 6] = z[2];
        break;
      default:
        u[ZETA_R + 3] = z[1];
        u[ZETA_R + 7] = z[3];
        break;
    }
    sol.values.col(j) = u;
  }
  return sol;
}

/// Eigen-system start on the fundamental homoclinic: psi = (0, Psi_k, 0, -i Psi_k)
/// with lambda = i (omega (kappa - k)^2 - s). lambda_R is seeded with
/// `lambda_r_seed` so that the projections are nondegenerate.
inline bvp::CollocationSolution eigen_seed(const bvp::CollocationSolution& homoclinic, int k,
                                           double lambda_r_seed = 1e-8) {
  if (homoclinic.state_dim != 4) throw DimensionError("eigen_seed: need a homoclinic solution");
  const auto model = model_of(homoclinic.parameters.values);
  const double kap = analytic::kappa(model.beta1);
  bvp::CollocationSolution sol(homoclinic.mesh, EIGEN_STATE_DIM, homoclinic.parameters);
  sol.parameters[LAMBDA_R] = lambda_r_seed;
  sol.parameters[LAMBDA_I] = model.omega * (kap - k) * (kap - k) - model.s;
  auto psi = [&](double x) { return analytic::embedded_eigenfunction_Psi(x, model.omega, kap, k); };
  for (int j = 0; j < sol.point_count(); ++j) {
    const double x = sol.point(j);
    const double v = psi(x), dv = detail::derivative(psi, x);
    Eigen::VectorXd u = Eigen::VectorXd::Zero(EIGEN_STATE_DIM);
    u.head<4>() = homoclinic.values.col(j);
    u[ZETA_R + 1] = v;
    u[ZETA_R + 5] = dv;
    u[ZETA_I + 3] = -v;
    u[ZETA_I + 7] = -dv;
    sol.values.col(j) = u;
  }
  return sol;
}

/// Gen-eig start: eta = (z3, z4, f3(z), f4(z)), eps = d = 0, with c1 and c2
/// set to the values of the corresponding integrals (scaled by `measure`).
inline bvp::CollocationSolution geneig_seed(const bvp::CollocationSolution& homoclinic, double measure = 1.0) {
  if (homoclinic.state_dim != 4) throw DimensionError("geneig_seed: need a homoclinic solution");
  bvp::CollocationSolution sol(homoclinic.mesh, GENEIG_STATE_DIM, homoclinic.parameters);
  auto& p = sol.parameters;
  p[D1] = p[D2] = p[EPS1] = p[EPS2] = 0;
  for (int j = 0; j < sol.point_count(); ++j) {
    const Eigen::VectorXd z = homoclinic.values.col(j);
    const Eigen::Vector4d f = homoclinic_rhs(z, p.values);
    Eigen::VectorXd u(GENEIG_STATE_DIM);
    u << z, z[2], z[3], f[2], f[3];
    sol.values.col(j) = u;
  }
  p[C1] = measure * bvp::integral_functional(
      sol, [](double, const Eigen::VectorXd& u) { return u[ETA] * u[ETA] + u[ETA + 1] * u[ETA + 1]; });
  p[C2] = measure * bvp::integral_functional(
      sol, [](double, const Eigen::VectorXd& u) { return u[ETA] * u[2] + u[ETA + 1] * u[3]; });
  return sol;
}

/// Copy the z part out of an eigen or gen-eig solution.
inline bvp::CollocationSolution homoclinic_part(const bvp::CollocationSolution& sol) {
  bvp::CollocationSolution h(sol.mesh, 4, sol.parameters);
  h.values = sol.values.topRows(4);
  return h;
}

// ---------------------------------------------------------------- diagnostics

struct Diagnostics {
  double norm_U = 0, norm_V = 0, norm_eta = 0;
  double z_minus = 0, z_plus = 0;
  double eta_minus = 0, eta_plus = 0;
};

inline Diagnostics diagnostics(const bvp::CollocationSolution& sol) {
  Diagnostics d;
  d.norm_U = bvp::component_l2_norm(sol, 0);
  d.norm_V = bvp::component_l2_norm(sol, 1);
  d.z_minus = sol.left_state().head(4).norm();
  d.z_plus = sol.right_state().head(4).norm();
  if (sol.state_dim == GENEIG_STATE_DIM) {
    d.norm_eta = std::sqrt(bvp::integral_functional(
        sol, [](double, const Eigen::VectorXd& u) { return u[ETA] * u[ETA] + u[ETA + 1] * u[ETA + 1]; }));
    d.eta_minus = sol.left_state().tail(4).norm();
    d.eta_plus = sol.right_state().tail(4).norm();
  } else if (sol.state_dim == EIGEN_STATE_DIM) {
    d.norm_eta = std::sqrt(bvp::integral_functional(sol, [](double, const Eigen::VectorXd& u) {
      return u.segment<4>(ZETA_R).squaredNorm() + u.segment<4>(ZETA_I).squaredNorm();
    }));
    d.eta_minus = sol.left_state().tail(16).norm();
    d.eta_plus = sol.right_state().tail(16).norm();
  }
  return d;
}

/// Number of sign changes of component k over the representation points,
/// ignoring values below `floor` in magnitude.
inline int sign_changes(const bvp::CollocationSolution& sol, int k, double floor = 1e-8) {
  int count = 0, last = 0;
  for (int j = 0; j < sol.point_count(); ++j) {
    const double v = sol.values(k, j);
    if (std::abs(v) <= floor) continue;
    const int sg = v > 0 ? 1 : -1;
    if (last != 0 && sg != last) ++count;
    last = sg;
  }
  return count;
}

struct FredholmResult {
  double I1 = 0, I2 = 0;
};

/// I1 = int eta_1 U dx, I2 = int eta_2 V dx on a gen-eig solution.
inline FredholmResult fredholm_integrals(const bvp::CollocationSolution& sol) {
  if (sol.state_dim != GENEIG_STATE_DIM) throw DimensionError("fredholm_integrals: need a gen-eig solution");
  FredholmResult r;
  r.I1 = bvp::integral_functional(sol, [](double, const Eigen::VectorXd& u) { return u[ETA] * u[0]; });
  r.I2 = bvp::integral_functional(sol, [](double, const Eigen::VectorXd& u) { return u[ETA + 1] * u[1]; });
  return r;
}

}  // namespace cnls::systems
