#include <cmath>
#include <complex>
#include <random>

#include <Eigen/Eigenvalues>
#include <gtest/gtest.h>

#include "cnls/bvp/assembly.hpp"
#include "cnls/bvp/newton.hpp"
#include "cnls/systems/seeds.hpp"

using namespace cnls;
using namespace cnls::systems;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

analytic::ModelParams model(double beta1) { return {1.0, 4.0, beta1, 2.0}; }

VectorXd random_params(std::mt19937& gen) {
  std::uniform_real_distribution<double> ud(-0.3, 0.3);
  VectorXd p = make_parameters(model(7.0)).values;
  for (int k = D1; k < PARAM_COUNT; ++k) p[k] = ud(gen);
  p[LAMBDA_R] = 0.4;
  p[LAMBDA_I] = 2.5;
  p[EPS2] = 0.35;
  return p;
}

VectorXd random_vector(std::mt19937& gen, int n) {
  std::uniform_real_distribution<double> ud(-1.0, 1.0);
  VectorXd v(n);
  for (int i = 0; i < n; ++i) v[i] = ud(gen);
  return v;
}

template <class F>
MatrixXd fd_jacobian(const F& f, const VectorXd& x0, double h = 1e-6) {
  const VectorXd f0 = f(x0);
  MatrixXd J(f0.size(), x0.size());
  for (int c = 0; c < x0.size(); ++c) {
    VectorXd xp = x0, xm = x0;
    xp[c] += h;
    xm[c] -= h;
    J.col(c) = (f(xp) - f(xm)) / (2 * h);
  }
  return J;
}

void expect_matrix_near(const MatrixXd& a, const MatrixXd& b, double tol) {
  ASSERT_EQ(a.rows(), b.rows());
  ASSERT_EQ(a.cols(), b.cols());
  for (int r = 0; r < a.rows(); ++r)
    for (int c = 0; c < a.cols(); ++c)
      EXPECT_NEAR(a(r, c), b(r, c), tol * std::max(1.0, std::abs(b(r, c)))) << r << "," << c;
}

void check_system_jacobians(const bvp::BvpSystem& sys, unsigned seed) {
  std::mt19937 gen(seed);
  const int n = sys.state_dim;
  const VectorXd p = random_params(gen);
  const VectorXd u = random_vector(gen, n);
  expect_matrix_near(sys.rhs_jac_state(0.0, u, p),
                     fd_jacobian([&](const VectorXd& v) { return sys.rhs(0.0, v, p); }, u), 1e-6);
  expect_matrix_near(sys.rhs_jac_params(0.0, u, p),
                     fd_jacobian([&](const VectorXd& q) { return sys.rhs(0.0, u, q); }, p), 1e-6);
  const VectorXd ua = 0.1 * random_vector(gen, n), ub = 0.1 * random_vector(gen, n);
  VectorXd all(2 * n + p.size());
  all << ua, ub, p;
  auto g = [&](const VectorXd& v) { return sys.bc(v.head(n), v.segment(n, n), v.tail(p.size())); };
  expect_matrix_near(sys.bc_jac(ua, ub, p), fd_jacobian(g, all), 1e-6);
}

// Rows of L span a left-invariant subspace of M: L M = K L, and the spectrum
// of K is the complement (in sign of real part) of the subspace L annihilates.
void expect_left_invariant(const MatrixXd& L, const MatrixXd& M, int real_sign) {
  const MatrixXd LM = L * M;
  const MatrixXd K = LM * L.completeOrthogonalDecomposition().pseudoInverse();
  EXPECT_LT((LM - K * L).cwiseAbs().maxCoeff(), 1e-10);
  Eigen::EigenSolver<MatrixXd> es(K);
  for (int i = 0; i < K.rows(); ++i) EXPECT_GT(real_sign * es.eigenvalues()[i].real(), 1e-6);
}

// rows of L annihilate the complementary invariant subspace of M exactly
void expect_annihilates(const MatrixXd& L, const MatrixXd& M, int annihilated_sign) {
  Eigen::ComplexEigenSolver<MatrixXd> es(M);
  int count = 0;
  for (int i = 0; i < M.rows(); ++i) {
    if (annihilated_sign * es.eigenvalues()[i].real() <= 0) continue;
    ++count;
    const Eigen::VectorXcd v = es.eigenvectors().col(i);
    EXPECT_LT((L.cast<std::complex<double>>() * v).cwiseAbs().maxCoeff(), 1e-10 * v.cwiseAbs().maxCoeff());
  }
  EXPECT_EQ(count, L.rows());
}

bvp::CollocationSolution fundamental(double beta1, double x_max, int ntst) {
  return fundamental_seed(model(beta1), bvp::Mesh::uniform(-x_max, x_max, ntst, 4));
}

// integral of an integral condition with the reference on the same mesh
double integrate_condition(const bvp::IntegralCondition& ic, const bvp::CollocationSolution& sol,
                           const bvp::CollocationSolution& ref) {
  const int n = sol.state_dim;
  bvp::CollocationSolution joint(sol.mesh, 2 * n, sol.parameters);
  joint.values << sol.values, ref.values;
  const VectorXd p = sol.parameters.values;
  return bvp::integral_functional(joint, [&](double x, const VectorXd& w) {
    return ic.integrand(x, w.head(n), w.tail(n), p);
  });
}

double u0(double x) { return analytic::fundamental_profile(x, 1.0); }
double u0x(double x) { return analytic::fundamental_profile_dx(x, 1.0); }
double u0xx(double x) { return u0(x) - std::pow(u0(x), 3); }
double u0xxx(double x) { return (1.0 - 3 * u0(x) * u0(x)) * u0x(x); }

}  // namespace

// ---------------------------------------------------------------- homoclinic

TEST(HomoclinicRhs, EquilibriumAndAnalyticSolution) {
  const VectorXd p = make_parameters(model(5.0)).values;
  EXPECT_EQ(homoclinic_rhs(VectorXd::Zero(4), p).norm(), 0.0);
  for (double x : {-3.0, -0.4, 0.0, 1.1, 4.0}) {
    VectorXd z(4);
    z << u0(x), 0, u0x(x), 0;
    const VectorXd f = homoclinic_rhs(z, p);
    EXPECT_NEAR(f[0], u0x(x), 1e-15);
    EXPECT_EQ(f[1], 0.0);
    EXPECT_NEAR(f[2], u0xx(x), 1e-14);
    EXPECT_EQ(f[3], 0.0);
  }
}

TEST(HomoclinicRhs, JacobianSpectrumAtOrigin) {
  for (double d1 : {0.0, 0.3}) {
    VectorXd p = make_parameters(model(5.0)).values;
    p[D1] = d1;
    Eigen::EigenSolver<MatrixXd> es(homoclinic_jac_state(VectorXd::Zero(4), p));
    std::vector<double> ev;
    for (int i = 0; i < 4; ++i) {
      EXPECT_NEAR(es.eigenvalues()[i].imag(), 0.0, 1e-14);
      ev.push_back(es.eigenvalues()[i].real());
    }
    std::sort(ev.begin(), ev.end());
    const double h = d1 / 2;
    const std::vector<double> expect = {h - std::sqrt(4 + h * h), h - std::sqrt(1 + h * h),
                                        h + std::sqrt(1 + h * h), h + std::sqrt(4 + h * h)};
    for (int i = 0; i < 4; ++i) EXPECT_NEAR(ev[i], expect[i], 1e-13);
  }
}

TEST(SystemJacobians, MatchFiniteDifferences) {
  check_system_jacobians(homoclinic_system(), 1);
  check_system_jacobians(eigen_system(), 2);
  check_system_jacobians(geneig_system(), 3);
}

TEST(SystemJacobians, FullCollocationJacobianMatches) {
  // assembled Jacobian of the eigen system, including integral conditions
  auto sys = eigen_system();
  std::mt19937 gen(9);
  auto sol = eigen_seed(fundamental(10.0, 4.0, 5), 0, 0.2);
  for (int i = 0; i < sol.values.size(); ++i) sol.values.data()[i] += 0.05 * random_vector(gen, 1)[0];
  auto ref = sol;
  for (int i = 0; i < ref.values.size(); ++i) ref.values.data()[i] += 0.05 * random_vector(gen, 1)[0];
  set_reference(sys, ref);
  sys.validate();
  const auto active = bvp::active_indices(sys, nullptr);
  const MatrixXd J = MatrixXd(bvp::assemble_jacobian(sys, sol, active).to_sparse());
  const VectorXd x0 = bvp::pack(sol, active);
  auto F = [&](const VectorXd& x) {
    auto s = sol;
    bvp::unpack(x, active, s);
    return bvp::assemble_residual(sys, s);
  };
  expect_matrix_near(J, fd_jacobian(F, x0), 1e-6);
}

TEST(HomoclinicBc, ProjectionsAnnihilateInvariantSubspaces) {
  for (double d1 : {0.0, 0.2, -0.45}) {
    VectorXd p = make_parameters(model(5.0)).values;
    p[D1] = d1;
    const MatrixXd M = homoclinic_jac_state(VectorXd::Zero(4), p);
    const auto L = homoclinic_projections(p[OMEGA], p[S], d1);
    expect_annihilates(L.stable, M, +1);
    expect_annihilates(L.unstable, M, -1);
    expect_left_invariant(L.stable, M, -1);
    expect_left_invariant(L.unstable, M, +1);
  }
}

TEST(HomoclinicBc, AnalyticWaveResidualDecays) {
  const VectorXd p = make_parameters(model(5.0)).values;
  for (double xm : {6.0, 9.0}) {
    VectorXd a(4), b(4);
    a << u0(-xm), 0, u0x(-xm), 0;
    b << u0(xm), 0, u0x(xm), 0;
    const double r = homoclinic_bc(a, b, p).cwiseAbs().maxCoeff();
    EXPECT_LT(r, 10 * std::exp(-2 * xm));
  }
}

TEST(PhaseCondition, ZeroAtReferenceAndTranslationTaylor) {
  const auto ic = phase_condition_ic1(4);
  const auto ref = fundamental(3.0, 8.0, 160);
  EXPECT_EQ(integrate_condition(ic, ref, ref), 0.0);
  const double norm2 = bvp::integral_functional(ref, [](double, const VectorXd& z) { return z[2] * z[2]; });
  for (double delta : {1e-3, 1e-4}) {
    auto moved = ref;
    moved.sample([delta](double x) {
      VectorXd z = VectorXd::Zero(4);
      z[0] = u0(x - delta);
      z[2] = u0x(x - delta);
      return z;
    });
    EXPECT_NEAR(integrate_condition(ic, moved, ref), -delta * norm2, 2 * delta * delta * norm2);
  }
}

TEST(PhaseCondition, AntisymmetricPerturbationOverlap) {
  // independent quadrature: int x sech(x) * (-sqrt2 sech tanh) dx via Simpson
  const auto ic = phase_condition_ic1(4);
  const auto ref = fundamental(3.0, 8.0, 160);
  auto sol = ref;
  for (int j = 0; j < sol.point_count(); ++j) sol.values(0, j) += 0.1 * sol.point(j) * analytic::sech(sol.point(j));
  const int n = 20000;
  const double h = 16.0 / n;
  double simpson = 0;
  for (int i = 0; i <= n; ++i) {
    const double x = -8.0 + i * h;
    const double w = (i == 0 || i == n) ? 1 : (i % 2 ? 4 : 2);
    simpson += w * 0.1 * x * analytic::sech(x) * u0x(x);
  }
  simpson *= h / 3;
  EXPECT_NEAR(integrate_condition(ic, sol, ref), simpson, 1e-10);
}

// ---------------------------------------------------------------- eigen

TEST(RhoDelta, MatchesComplexSquareRoot) {
  for (double lr : {0.7, -0.3, 1e-8, 0.0})
    for (double li : {0.0, 0.5, 2.5, 12.0, -6.0}) {
      const auto rd = rho_delta(1.0, 4.0, lr, li);
      const std::complex<double> lam(lr, li), I(0, 1);
      const auto p1 = std::sqrt(1.0 + I * lam), m1 = std::sqrt(1.0 - I * lam);
      const auto p2 = std::sqrt(4.0 + I * lam), m2 = std::sqrt(4.0 - I * lam);
      if (lr == 0.0) {
        // sgn(0) = +1 fixes the branch: delta+ >= 0, delta- <= 0
        EXPECT_NEAR(rd.rho1[0], std::abs(p1.real()), 1e-14);
        EXPECT_NEAR(rd.delta1[0], std::abs(p1.imag()), 1e-14);
        EXPECT_NEAR(rd.delta1[1], -std::abs(m1.imag()), 1e-14);
        EXPECT_NEAR(rd.delta2[1], -std::abs(m2.imag()), 1e-14);
        continue;
      }
      EXPECT_NEAR(rd.rho1[0], p1.real(), 1e-14);
      EXPECT_NEAR(rd.delta1[0], p1.imag(), 1e-14);
      EXPECT_NEAR(rd.rho1[1], m1.real(), 1e-14);
      EXPECT_NEAR(rd.delta1[1], m1.imag(), 1e-14);
      EXPECT_NEAR(rd.rho2[0], p2.real(), 1e-14);
      EXPECT_NEAR(rd.delta2[0], p2.imag(), 1e-14);
      EXPECT_NEAR(rd.rho2[1], m2.real(), 1e-14);
      EXPECT_NEAR(rd.delta2[1], m2.imag(), 1e-14);
    }
}

TEST(RhoDelta, RealLambdaClosedForm) {
  const double lr = 0.9;
  const auto rd = rho_delta(1.0, 4.0, lr, 0.0);
  const double d = std::sqrt((std::sqrt(1 + lr * lr) - 1) / 2);
  EXPECT_NEAR(rd.delta1[0], d, 1e-15);
  EXPECT_NEAR(rd.delta1[1], -d, 1e-15);
}

TEST(RhoDelta, DerivativesMatchFiniteDifferences) {
  const double base[4] = {1.0, 4.0, 0.6, 3.0};
  const int which[4] = {OMEGA, S, LAMBDA_R, LAMBDA_I};
  const auto rd = rho_delta(base[0], base[1], base[2], base[3]);
  for (int w = 0; w < 4; ++w) {
    double bp[4], bm[4];
    std::copy(base, base + 4, bp);
    std::copy(base, base + 4, bm);
    const double h = 1e-6;
    bp[w] += h;
    bm[w] -= h;
    const auto a = rho_delta(bp[0], bp[1], bp[2], bp[3]), b = rho_delta(bm[0], bm[1], bm[2], bm[3]);
    const auto d = rho_delta_derivative(rd, which[w]);
    for (int k = 0; k < 2; ++k) {
      EXPECT_NEAR(d.rho1[k], (a.rho1[k] - b.rho1[k]) / (2 * h), 1e-8);
      EXPECT_NEAR(d.delta1[k], (a.delta1[k] - b.delta1[k]) / (2 * h), 1e-8);
      EXPECT_NEAR(d.rho2[k], (a.rho2[k] - b.rho2[k]) / (2 * h), 1e-8);
      EXPECT_NEAR(d.delta2[k], (a.delta2[k] - b.delta2[k]) / (2 * h), 1e-8);
    }
  }
}

TEST(EigenBc, DegenerateOnEssentialSpectrum) {
  VectorXd p = make_parameters(model(10.0)).values;
  p[LAMBDA_I] = 12.0;
  const VectorXd z = VectorXd::Zero(EIGEN_STATE_DIM);
  EXPECT_THROW(eigen_bc(z, z, p), DegenerateProjectionError);
  p[LAMBDA_R] = 1e-8;
  EXPECT_NO_THROW(eigen_bc(z, z, p));
}

TEST(EigenBc, TildeProjectionsAnnihilateInvariantSubspaces) {
  for (auto [lr, li] : {std::pair{0.3, 2.0}, std::pair{1.5, -0.7}, std::pair{0.05, 12.0}, std::pair{0.0, 0.4}}) {
    VectorXd p = make_parameters(model(6.0)).values;
    p[LAMBDA_R] = lr;
    p[LAMBDA_I] = li;
    const MatrixXd J = eigen_jac_state(VectorXd::Zero(EIGEN_STATE_DIM), p);
    const MatrixXd M = J.bottomRightCorner(16, 16);
    const auto L = tilde_projections(rho_delta(1.0, 4.0, lr, li));
    expect_annihilates(L.stable, M, +1);
    expect_annihilates(L.unstable, M, -1);
  }
}

TEST(EigenBc, LambdaZeroCollapsesToHomoclinicCopies) {
  const auto rd = rho_delta(1.0, 4.0, 0.0, 0.0);
  EXPECT_DOUBLE_EQ(rd.rho1[0], 1.0);
  EXPECT_DOUBLE_EQ(rd.rho2[1], 2.0);
  EXPECT_EQ(rd.delta1[0], 0.0);
  EXPECT_EQ(rd.delta2[1], 0.0);
  const auto L = tilde_projections(rd);
  // eight decoupled rows  -+ rate * psi_j + psi_j'
  for (int k = 0; k < 2; ++k) {
    const double sg = k == 0 ? -1.0 : 1.0;
    MatrixXd H = MatrixXd::Zero(8, 16);
    const double rate[4] = {1.0, 2.0, 1.0, 2.0};
    for (int part = 0; part < 2; ++part)
      for (int j = 0; j < 4; ++j) {
        H(part * 4 + j, part * 8 + j) = sg * rate[j];
        H(part * 4 + j, part * 8 + 4 + j) = 1.0;
      }
    MatrixXd stacked(16, 16);
    stacked << (k == 0 ? L.stable : L.unstable), H;
    Eigen::FullPivLU<MatrixXd> lu(stacked);
    lu.setThreshold(1e-12);
    EXPECT_EQ(lu.rank(), 8);
  }
}

TEST(EigenBc, DecayingModeResidualSmall) {
  // a stable mode of the asymptotic matrix sampled at x+ is annihilated by L~^u
  VectorXd p = make_parameters(model(6.0)).values;
  p[LAMBDA_R] = 0.3;
  p[LAMBDA_I] = 2.0;
  const MatrixXd M = eigen_jac_state(VectorXd::Zero(EIGEN_STATE_DIM), p).bottomRightCorner(16, 16);
  Eigen::ComplexEigenSolver<MatrixXd> es(M);
  const auto L = tilde_projections(rho_delta(1.0, 4.0, 0.3, 2.0));
  for (int i = 0; i < 16; ++i) {
    if (es.eigenvalues()[i].real() >= 0) continue;
    const Eigen::VectorXcd v = es.eigenvectors().col(i) * std::exp(es.eigenvalues()[i] * 11.0);
    const VectorXd re = v.real(), im = v.imag();
    EXPECT_LT((L.unstable * re).cwiseAbs().maxCoeff(), 1e-14);
    EXPECT_LT((L.unstable * im).cwiseAbs().maxCoeff(), 1e-14);
  }
}

TEST(EigenRhs, KernelStatesHaveZeroResidual) {
  // pointwise: derivative of the analytic kernel state equals the rhs
  const VectorXd p = make_parameters(model(10.0)).values;
  for (double x : {-4.0, -1.3, 0.0, 0.7, 3.5}) {
    VectorXd z(4), dz(4);
    z << u0(x), 0, u0x(x), 0;
    dz << u0x(x), 0, u0xx(x), 0;
    for (int which = 1; which <= 3; ++which) {
      VectorXd u = VectorXd::Zero(EIGEN_STATE_DIM), du = VectorXd::Zero(EIGEN_STATE_DIM);
      u.head<4>() = z;
      du.head<4>() = dz;
      if (which == 1) {
        u[ZETA_R] = u0x(x);
        u[ZETA_R + 4] = u0xx(x);
        du[ZETA_R] = u0xx(x);
        du[ZETA_R + 4] = u0xxx(x);
      } else if (which == 2) {
        u[ZETA_R + 2] = u0(x);
        u[ZETA_R + 6] = u0x(x);
        du[ZETA_R + 2] = u0x(x);
        du[ZETA_R + 6] = u0xx(x);
      }
      EXPECT_LT((eigen_rhs(u, p) - du).cwiseAbs().maxCoeff(), 1e-13) << which;
    }
  }
}

TEST(EigenRhs, KernelStatesOnConvergedHomoclinic) {
  auto sys = homoclinic_system();
  const auto seed = fundamental(6.0, 7.0, 200);
  set_reference(sys, seed);
  const auto h = bvp::solve_newton(sys, seed).solution;
  EXPECT_LT(std::abs(h.parameters[D1]), 1e-8);
  auto esys = eigen_system();
  for (int which = 1; which <= 3; ++which) {
    const auto k = kernel_state(h, which);
    set_reference(esys, k);
    const VectorXd r = bvp::assemble_residual(esys, k);
    EXPECT_LT(bvp::max_norm(r), 1e-7) << which;
  }
}

TEST(EigenRhs, EmbeddedEigenfunctionResidual) {
  // beta1 = 10 (kappa = 4), k = 0: lambda = 12 i
  VectorXd p = make_parameters(model(10.0)).values;
  p[LAMBDA_I] = 12.0;
  auto psi = [](double x) { return analytic::embedded_eigenfunction_Psi(x, 1.0, 4.0, 0); };
  const double h = 2e-3;
  double worst = 0;
  for (double x = -6.0; x <= 6.0; x += 0.37) {
    const double d1 = (8 * (psi(x + h) - psi(x - h)) - (psi(x + 2 * h) - psi(x - 2 * h))) / (12 * h);
    const double d2 =
        (-psi(x + 2 * h) + 16 * psi(x + h) - 30 * psi(x) + 16 * psi(x - h) - psi(x - 2 * h)) / (12 * h * h);
    VectorXd u = VectorXd::Zero(EIGEN_STATE_DIM);
    u << u0(x), 0, u0x(x), 0, VectorXd::Zero(16);
    u[ZETA_R + 1] = psi(x);
    u[ZETA_R + 5] = d1;
    u[ZETA_I + 3] = -psi(x);
    u[ZETA_I + 7] = -d1;
    const VectorXd f = eigen_rhs(u, p);
    worst = std::max({worst, std::abs(f[ZETA_R + 5] - d2), std::abs(f[ZETA_I + 7] + d2)});
    EXPECT_EQ(f[ZETA_R + 4], 0.0);
    EXPECT_EQ(f[ZETA_I + 6], 0.0);
  }
  EXPECT_LT(worst, 1e-8);
}

TEST(EigenSeed, OnsetValues) {
  const auto s = eigen_seed(fundamental(10.0, 5.0, 40), 0);
  EXPECT_NEAR(s.parameters[LAMBDA_I], 12.0, 1e-10);
  EXPECT_EQ(s.parameters[LAMBDA_R], 1e-8);
  EXPECT_NEAR(eigen_seed(fundamental(10.0, 5.0, 40), 1).parameters[LAMBDA_I], 5.0, 1e-10);
}

TEST(EigenPhase, ReferenceRotationAndScaling) {
  const auto ref = eigen_seed(fundamental(10.0, 8.0, 120), 0);
  const auto a = eigen_phase_ic2(false), b = eigen_phase_ic2(true);
  EXPECT_EQ(integrate_condition(a, ref, ref), 0.0);
  EXPECT_EQ(integrate_condition(b, ref, ref), 0.0);
  const double norm2 = bvp::integral_functional(ref, [](double, const VectorXd& u) {
    return u.segment<4>(ZETA_R).squaredNorm() + u.segment<4>(ZETA_I).squaredNorm();
  });
  for (double t : {1e-2, 1e-3}) {
    auto rot = ref, scaled = ref;
    const double c = std::cos(t), sn = std::sin(t);
    rot.values.middleRows(ZETA_R, 8) = c * ref.values.middleRows(ZETA_R, 8) - sn * ref.values.middleRows(ZETA_I, 8);
    rot.values.middleRows(ZETA_I, 8) = sn * ref.values.middleRows(ZETA_R, 8) + c * ref.values.middleRows(ZETA_I, 8);
    scaled.values.bottomRows(16) *= 1 + t;
    EXPECT_NEAR(integrate_condition(a, rot, ref), 0.0, t * t * norm2);
    EXPECT_NEAR(integrate_condition(b, rot, ref), t * norm2, t * t * norm2);
    EXPECT_NEAR(integrate_condition(a, scaled, ref), t * norm2, 1e-12 * norm2);
    EXPECT_NEAR(integrate_condition(b, scaled, ref), 0.0, 1e-12 * norm2);
  }
}

TEST(EigenSystem, SpectralSymmetry) {
  // (lambda, psi) -> (-lambda, psi with psi_3, psi_4 negated) keeps the rhs residual
  std::mt19937 gen(5);
  VectorXd p = random_params(gen), q = p;
  q[LAMBDA_R] = -p[LAMBDA_R];
  q[LAMBDA_I] = -p[LAMBDA_I];
  VectorXd u = random_vector(gen, EIGEN_STATE_DIM), v = u;
  for (int off : {ZETA_R, ZETA_I})
    for (int j : {2, 3, 6, 7}) v[off + j] = -u[off + j];
  const VectorXd fu = eigen_rhs(u, p), fv = eigen_rhs(v, q);
  VectorXd back = fv;
  for (int off : {ZETA_R, ZETA_I})
    for (int j : {2, 3, 6, 7}) back[off + j] = -fv[off + j];
  EXPECT_LT((back - fu).cwiseAbs().maxCoeff(), 1e-14);
}

// ---------------------------------------------------------------- generalized eigenfunction

TEST(GeneigRhs, TranslationModeWithZeroForcing) {
  const VectorXd p = make_parameters(model(8.0)).values;
  for (double x : {-3.0, 0.2, 2.5}) {
    VectorXd u(8), du(8);
    u << u0(x), 0, u0x(x), 0, u0x(x), 0, u0xx(x), 0;
    du << u0x(x), 0, u0xx(x), 0, u0xx(x), 0, u0xxx(x), 0;
    EXPECT_LT((geneig_rhs(u, p) - du).cwiseAbs().maxCoeff(), 1e-13);
  }
}

TEST(GeneigRhs, OmegaDerivativeIsGeneralizedKernel) {
  VectorXd p = make_parameters(model(8.0)).values;
  p[EPS1] = 1.0;
  p[EPS2] = 0.0;
  const double hw = 1e-4, hx = 2e-3;
  auto chi = [&](double x) {
    return (analytic::fundamental_profile(x, 1.0 + hw) - analytic::fundamental_profile(x, 1.0 - hw)) / (2 * hw);
  };
  for (double x : {-2.0, -0.5, 0.3, 1.7}) {
    const double c1 = (chi(x + hx) - chi(x - hx)) / (2 * hx);
    const double c2 = (chi(x + hx) - 2 * chi(x) + chi(x - hx)) / (hx * hx);
    VectorXd u(8);
    u << u0(x), 0, u0x(x), 0, chi(x), 0, c1, 0;
    EXPECT_NEAR(geneig_rhs(u, p)[ETA + 2], c2, 1e-5);
  }
}

TEST(GeneigRhs, LinearInEtaAndEps1) {
  std::mt19937 gen(11);
  VectorXd p = random_params(gen);
  p[D2] = 0.0;
  const VectorXd u = random_vector(gen, 8);
  VectorXd v = u, q = p;
  const double a = -1.7;
  v.tail(4) *= a;
  q[EPS1] *= a;
  const VectorXd fu = geneig_rhs(u, p), fv = geneig_rhs(v, q);
  EXPECT_LT((fv.tail(4) - a * fu.tail(4)).cwiseAbs().maxCoeff(), 1e-13);
  EXPECT_LT((fv.head(4) - fu.head(4)).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(GeneigBc, CornersVanishWithoutForcing) {
  VectorXd p = make_parameters(model(20.0)).values;
  p[D1] = 1e-3;
  const auto L = hat_projections(p);
  EXPECT_EQ(L.stable(2, 0), 0.0);
  EXPECT_EQ(L.unstable(3, 1), 0.0);
  EXPECT_DOUBLE_EQ(L.stable(2, 4), -1.0);
  EXPECT_DOUBLE_EQ(L.unstable(3, 5), 2.0);
}

TEST(GeneigBc, HatProjectionsAnnihilateInvariantSubspaces) {
  for (auto [e1, e2, d2] : {std::tuple{0.0, 0.0, 0.0}, std::tuple{0.4, 0.3, 0.0}, std::tuple{0.7, 0.8, 0.25}}) {
    VectorXd p = make_parameters(model(20.0)).values;
    p[EPS1] = e1;
    p[EPS2] = e2;
    p[D2] = d2;
    const MatrixXd M = geneig_jac_state(VectorXd::Zero(8), p);
    const auto L = hat_projections(p);
    // the asymptotic matrix has Jordan blocks, so test left invariance
    expect_left_invariant(L.stable, M, -1);
    expect_left_invariant(L.unstable, M, +1);
  }
}

TEST(GeneigBc, SmallD1RatioIsSecondOrder) {
  // (sqrt(w + d^2/4) - sqrt(w)) / d versus d / (8 sqrt(w))
  std::vector<double> err;
  for (double d : {1e-1, 5e-2}) {
    const double exact = (std::sqrt(1.0 + d * d / 4) - 1.0) / d;
    err.push_back(std::abs(exact - d / 8) / (d / 8));
  }
  EXPECT_NEAR(std::log2(err[0] / err[1]), 2.0, 0.05);
}

TEST(GeneigSeed, IntegralsMatchTranslationMode) {
  const auto h = fundamental(20.0, 9.0, 200);
  const auto g = geneig_seed(h);
  const double c = bvp::integral_functional(h, [](double, const VectorXd& z) { return z[2] * z[2]; });
  EXPECT_NEAR(g.parameters[C1], c, 1e-12);
  EXPECT_NEAR(g.parameters[C2], c, 1e-12);
  // ic3, ic4 vanish at the seed
  const auto ic3 = geneig_ic3(), ic4 = geneig_ic4();
  EXPECT_NEAR(integrate_condition(ic3, g, g) - g.parameters[C1], 0.0, 1e-14);
  EXPECT_NEAR(integrate_condition(ic4, g, g) - g.parameters[C2], 0.0, 1e-14);
}

TEST(GeneigSeed, UnitIntervalMeasure) {
  const auto h = fundamental(20.0, 9.0, 200);
  const double mu = unit_interval_measure(h.mesh);
  EXPECT_DOUBLE_EQ(mu, 1.0 / 18.0);
  const auto g = geneig_seed(h, mu), g1 = geneig_seed(h);
  EXPECT_NEAR(g.parameters[C1], g1.parameters[C1] / 18.0, 1e-15);
  const auto ic3 = geneig_ic3(mu), ic4 = geneig_ic4(mu);
  EXPECT_NEAR(integrate_condition(ic3, g, g) - g.parameters[C1], 0.0, 1e-15);
  EXPECT_NEAR(integrate_condition(ic4, g, g) - g.parameters[C2], 0.0, 1e-15);
  check_system_jacobians(geneig_system(mu), 3);
}

TEST(Fredholm, ParityAndLinearity) {
  const auto g = geneig_seed(fundamental(20.0, 9.0, 200));
  const auto r = fredholm_integrals(g);
  EXPECT_NEAR(r.I1, 0.0, 1e-14);
  EXPECT_EQ(r.I2, 0.0);
  auto g2 = g;
  for (int j = 0; j < g2.point_count(); ++j) g2.values(ETA, j) = -g.values(0, j) * g.values(0, j);
  auto g3 = g2;
  g3.values.bottomRows(4) *= -1;
  EXPECT_NEAR(fredholm_integrals(g3).I1, -fredholm_integrals(g2).I1, 1e-15);
  EXPECT_GT(std::abs(fredholm_integrals(g2).I1), 0.1);
}

TEST(Diagnostics, NormsAndSignChanges) {
  const auto h = fundamental(5.0, 8.0, 160);
  const auto d = diagnostics(h);
  EXPECT_NEAR(d.norm_U, 2.0 * std::sqrt(std::tanh(8.0)), 1e-9);  // int 2 sech^2 = 4 tanh 8
  EXPECT_EQ(d.norm_V, 0.0);
  EXPECT_LT(d.z_minus, 1e-2);
  auto b = branch_seed(model(5.0), 2, 0.1, h.mesh);
  EXPECT_DOUBLE_EQ(b.parameters[BETA1], 10.0);
  EXPECT_EQ(sign_changes(b, 1), 2);
  EXPECT_EQ(sign_changes(branch_seed(model(5.0), 3, 0.1, h.mesh), 1), 3);
}

TEST(Newton, FundamentalHomoclinicConverges) {
  auto sys = homoclinic_system();
  auto seed = fundamental(10.0, 5.0, 100);
  seed.values *= 1.02;
  set_reference(sys, fundamental(10.0, 5.0, 100));
  const auto res = bvp::solve_newton(sys, seed);
  EXPECT_LT(std::abs(res.solution.parameters[D1]), 1e-8);
  EXPECT_LT(res.residual, 1e-10);
}
