#pragma once

// Numerical self-checks: analytic residuals, Jacobians against central
// differences, collocation order on a linear problem, kernel states.

#include <cmath>
#include <random>

#include <Eigen/Dense>

#include "cnls/analytic/formulas.hpp"
#include "cnls/bvp/newton.hpp"
#include "cnls/systems/seeds.hpp"

namespace cnls::runner {

/// max |U0'' - omega U0 + U0^3| on [-x_max, x_max] with the closed-form
/// second derivative.
inline double fundamental_residual(double omega, double x_max = 20.0, int samples = 4001) {
  const double a = std::sqrt(2.0 * omega), r = std::sqrt(omega);
  double worst = 0;
  for (int i = 0; i < samples; ++i) {
    const double x = -x_max + 2.0 * x_max * i / (samples - 1);
    const double sh = 1.0 / std::cosh(r * x), th = std::tanh(r * x);
    const double u = analytic::fundamental_profile(x, omega);
    const double uxx = a * omega * sh * (th * th - sh * sh);
    worst = std::max(worst, std::abs(uxx - omega * u + u * u * u));
    // the first derivative against its closed form
    worst = std::max(worst, std::abs(analytic::fundamental_profile_dx(x, omega) + a * r * sh * th));
  }
  return worst;
}

namespace detail {

template <class F>
Eigen::MatrixXd central_jacobian(const F& f, const Eigen::VectorXd& x, double h = 1e-6) {
  const Eigen::VectorXd f0 = f(x);
  Eigen::MatrixXd J(f0.size(), x.size());
  for (int j = 0; j < x.size(); ++j) {
    Eigen::VectorXd xp = x, xm = x;
    xp[j] += h;
    xm[j] -= h;
    J.col(j) = (f(xp) - f(xm)) / (2 * h);
  }
  return J;
}

inline double relative_gap(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  double w = 0;
  for (int r = 0; r < a.rows(); ++r)
    for (int c = 0; c < a.cols(); ++c) w = std::max(w, std::abs(a(r, c) - b(r, c)) / std::max(1.0, std::abs(b(r, c))));
  return w;
}

}  // namespace detail

/// Largest entrywise gap between analytic and difference Jacobians of the
/// vector field, its parameter derivative and the boundary map, at random
/// states with the model parameters of `model`.
inline double pointwise_jacobian_gap(const bvp::BvpSystem& sys, const analytic::ModelParams& model, unsigned seed) {
  std::mt19937 gen(seed);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  const int n = sys.state_dim;
  Eigen::VectorXd p = systems::make_parameters(model).values;
  p[systems::BETA1] = 7.5;
  p[systems::D1] = 0.03;
  p[systems::D2] = -0.02;
  p[systems::EPS1] = 0.4;
  p[systems::EPS2] = 0.3;
  p[systems::LAMBDA_R] = 0.6;
  p[systems::LAMBDA_I] = 2.1;
  auto rnd = [&](int k, double scale) {
    Eigen::VectorXd v(k);
    for (int i = 0; i < k; ++i) v[i] = scale * U(gen);
    return v;
  };
  const Eigen::VectorXd u = rnd(n, 1.0);
  double gap = detail::relative_gap(sys.rhs_jac_state(0.0, u, p),
                                    detail::central_jacobian([&](const Eigen::VectorXd& v) { return sys.rhs(0.0, v, p); }, u));
  gap = std::max(gap, detail::relative_gap(sys.rhs_jac_params(0.0, u, p),
                                           detail::central_jacobian(
                                               [&](const Eigen::VectorXd& q) { return sys.rhs(0.0, u, q); }, p)));
  const Eigen::VectorXd ua = rnd(n, 0.1), ub = rnd(n, 0.1);
  Eigen::VectorXd all(2 * n + p.size());
  all << ua, ub, p;
  auto g = [&](const Eigen::VectorXd& v) { return sys.bc(v.head(n), v.segment(n, n), v.tail(p.size())); };
  gap = std::max(gap, detail::relative_gap(sys.bc_jac(ua, ub, p), detail::central_jacobian(g, all)));
  return gap;
}

/// Assembled collocation Jacobian (with boundary and integral rows) against
/// differences of the assembled residual, at `sol` with its reference set.
inline double collocation_jacobian_gap(const bvp::BvpSystem& sys, const bvp::CollocationSolution& sol) {
  const auto active = bvp::active_indices(sys, nullptr);
  const Eigen::MatrixXd J = Eigen::MatrixXd(bvp::assemble_jacobian(sys, sol, active).to_sparse());
  auto F = [&](const Eigen::VectorXd& x) {
    auto s = sol;
    bvp::unpack(x, active, s);
    return bvp::assemble_residual(sys, s);
  };
  return detail::relative_gap(J, detail::central_jacobian(F, bvp::pack(sol, active)));
}

/// Observed order of the nodal error for u'' = -u, u(a) = 0, u(b) = 1 on
/// [-5, 5] with `ncol` collocation points, from NTST = 8 and 32.
inline double collocation_order(int ncol) {
  bvp::BvpSystem s;
  s.name = "harmonic";
  s.state_dim = 2;
  s.parameter_names = {"p"};  // unused
  s.rhs = [](double, const Eigen::VectorXd& u, const Eigen::VectorXd&) {
    Eigen::VectorXd f(2);
    f << u[1], -u[0];
    return f;
  };
  s.rhs_jac_state = [](double, const Eigen::VectorXd&, const Eigen::VectorXd&) {
    Eigen::MatrixXd J(2, 2);
    J << 0, 1, -1, 0;
    return J;
  };
  s.rhs_jac_params = [](double, const Eigen::VectorXd&, const Eigen::VectorXd&) { return Eigen::MatrixXd::Zero(2, 1).eval(); };
  s.bc_count = 2;
  s.bc = [](const Eigen::VectorXd& a, const Eigen::VectorXd& b, const Eigen::VectorXd&) {
    Eigen::VectorXd g(2);
    g << a[0], b[0] - 1.0;
    return g;
  };
  s.bc_jac = [](const Eigen::VectorXd&, const Eigen::VectorXd&, const Eigen::VectorXd&) {
    Eigen::MatrixXd G = Eigen::MatrixXd::Zero(2, 5);
    G(0, 0) = 1;
    G(1, 2) = 1;
    return G;
  };
  const double a = -5.0, b = 5.0;
  double e[2];
  const int ntst[2] = {8, 32};
  for (int t = 0; t < 2; ++t) {
    const auto mesh = bvp::Mesh::uniform(a, b, ntst[t], ncol);
    const auto sol = bvp::solve_newton(s, bvp::CollocationSolution(mesh, 2, s.make_parameters())).solution;
    e[t] = 0;
    for (int i = 0; i <= ntst[t]; ++i) {
      const double x = mesh.node_positions[i];
      e[t] = std::max(e[t], std::abs(sol.values(0, i * ncol) - std::sin(x - a) / std::sin(b - a)));
    }
  }
  return std::log(e[0] / e[1]) / std::log(4.0);
}

struct KernelCheck {
  double gauge = 0;        // phi2, phi3
  double translation = 0;  // phi1 on the given mesh
  double translation_fine = 0;
  double order = 0;        // of the phi1 residual under mesh doubling
};

inline double kernel_residual(const bvp::CollocationSolution& homoclinic, int which) {
  auto sys = systems::eigen_system();
  const auto k = systems::kernel_state(homoclinic, which);
  systems::set_reference(sys, k);
  return bvp::max_norm(bvp::assemble_residual(sys, k));
}

/// Eigen-system residuals of the kernel states at lambda = 0. phi2, phi3 are
/// linear in the collocated state and vanish to rounding. phi1 needs the
/// derivative of the collocant, so its residual is the discretization defect
/// and is checked to go to zero under refinement.
inline KernelCheck kernel_state_check(const bvp::CollocationSolution& homoclinic) {
  KernelCheck k;
  k.gauge = std::max(kernel_residual(homoclinic, 2), kernel_residual(homoclinic, 3));
  k.translation = kernel_residual(homoclinic, 1);
  const auto& m = homoclinic.mesh;
  const auto fine_mesh = bvp::Mesh::uniform(m.x_minus, m.x_plus, 2 * m.interval_count, m.collocation_degree);
  const auto guess = bvp::remesh(homoclinic, fine_mesh);
  auto sys = systems::homoclinic_system();
  systems::set_reference(sys, guess);
  bvp::NewtonSettings ns;
  ns.residual_tol = 1e-11;
  ns.max_iterations = 30;
  const auto fine = bvp::solve_newton(sys, guess, ns).solution;
  k.translation_fine = kernel_residual(fine, 1);
  k.order = std::log2(k.translation / k.translation_fine);
  return k;
}

}  // namespace cnls::runner
