#pragma once

// Projection boundary matrices for the three systems and their parameter
// derivatives. "stable" rows are imposed at x-, "unstable" rows at x+.

#include <cmath>
#include <complex>

#include <Eigen/Dense>

#include "cnls/errors.hpp"
#include "cnls/systems/params.hpp"

namespace cnls::systems {

struct ProjectionMatrices {
  Eigen::MatrixXd stable;
  Eigen::MatrixXd unstable;
};

// ---------------------------------------------------------------- homoclinic

namespace detail {

// -d1/2 -+ sqrt(w + d1^2/4) and its derivatives in w and d1
struct RootEntry {
  double value, d_w, d_d1;
};

inline RootEntry root_entry(double w, double d1, double sign) {
  const double r = std::sqrt(w + 0.25 * d1 * d1);
  return {-0.5 * d1 + sign * r, sign * 0.5 / r, -0.5 + sign * 0.25 * d1 / r};
}

}  // namespace detail

/// 2x4 rows (L^s, L^u); `which` selects a parameter derivative (-1: value).
inline ProjectionMatrices homoclinic_projections(double omega, double s, double d1, int which = -1) {
  ProjectionMatrices pm{Eigen::MatrixXd::Zero(2, 4), Eigen::MatrixXd::Zero(2, 4)};
  for (int k = 0; k < 2; ++k) {
    Eigen::MatrixXd& L = k == 0 ? pm.stable : pm.unstable;
    const double sign = k == 0 ? -1.0 : 1.0;
    const auto e1 = detail::root_entry(omega, d1, sign);
    const auto e2 = detail::root_entry(s, d1, sign);
    switch (which) {
      case -1:
        L(0, 0) = e1.value;
        L(1, 1) = e2.value;
        L(0, 2) = 1.0;
        L(1, 3) = 1.0;
        break;
      case OMEGA: L(0, 0) = e1.d_w; break;
      case S: L(1, 1) = e2.d_w; break;
      case D1:
        L(0, 0) = e1.d_d1;
        L(1, 1) = e2.d_d1;
        break;
      default: break;
    }
  }
  return pm;
}

// ---------------------------------------------------------------- eigen

/// sqrt(omega +- i lambda) = rho_1+- + i delta_1+-, sqrt(s +- i lambda) = rho_2+- + i delta_2+-.
/// Index 0 is the "+" root, index 1 the "-" root.
struct RhoDelta {
  double rho1[2] = {0, 0}, delta1[2] = {0, 0}, rho2[2] = {0, 0}, delta2[2] = {0, 0};
};

namespace detail {

inline double sgn_plus(double x) { return x < 0.0 ? -1.0 : 1.0; }

inline void rho_delta_pair(double w, double lr, double li, double& rho_p, double& del_p, double& rho_m,
                           double& del_m) {
  // the smaller of |rho|, |delta| is recovered from rho * delta = +-lr / 2 to avoid cancellation
  for (int k = 0; k < 2; ++k) {
    const double a = k == 0 ? w - li : w + li;
    const double sg = (k == 0 ? 1.0 : -1.0) * sgn_plus(lr);
    const double mod = std::hypot(a, lr);
    double rho, del;
    if (a >= 0) {
      rho = std::sqrt(0.5 * (mod + a));
      del = rho > 0 ? sg * std::abs(lr) / (2 * rho) : 0.0;
    } else {
      const double d = std::sqrt(0.5 * (mod - a));
      rho = std::abs(lr) / (2 * d);
      del = sg * d;
    }
    (k == 0 ? rho_p : rho_m) = rho;
    (k == 0 ? del_p : del_m) = del;
  }
}

}  // namespace detail

inline RhoDelta rho_delta(double omega, double s, double lambda_r, double lambda_i) {
  RhoDelta rd;
  detail::rho_delta_pair(omega, lambda_r, lambda_i, rd.rho1[0], rd.delta1[0], rd.rho1[1], rd.delta1[1]);
  detail::rho_delta_pair(s, lambda_r, lambda_i, rd.rho2[0], rd.delta2[0], rd.rho2[1], rd.delta2[1]);
  return rd;
}

/// Derivative of every rho/delta with respect to omega, s, lambda_R or lambda_I,
/// from d sqrt(w) = dw / (2 sqrt(w)).
inline RhoDelta rho_delta_derivative(const RhoDelta& rd, int which) {
  RhoDelta d;
  for (int k = 0; k < 2; ++k) {
    const double pm = k == 0 ? 1.0 : -1.0;  // w = base +- i lambda
    std::complex<double> dw(0.0, 0.0);
    bool first = true, second = true;
    switch (which) {
      case OMEGA: dw = 1.0; second = false; break;
      case S: dw = 1.0; first = false; break;
      case LAMBDA_R: dw = {0.0, pm}; break;
      case LAMBDA_I: dw = -pm; break;
      default: return d;
    }
    if (first) {
      const auto r = dw / (2.0 * std::complex<double>(rd.rho1[k], rd.delta1[k]));
      d.rho1[k] = r.real();
      d.delta1[k] = r.imag();
    }
    if (second) {
      const auto r = dw / (2.0 * std::complex<double>(rd.rho2[k], rd.delta2[k]));
      d.rho2[k] = r.real();
      d.delta2[k] = r.imag();
    }
  }
  return d;
}

inline void check_nondegenerate(const RhoDelta& rd) {
  for (int k = 0; k < 2; ++k)
    if (rd.rho1[k] == 0.0 || rd.rho2[k] == 0.0)
      throw DegenerateProjectionError(
          "eigen projections: rho = 0, lambda lies on the essential spectrum with lambda_R = 0");
}

/// 8x16 matrices acting on (zeta_R, zeta_I). With constant_blocks = false only
/// the rho/delta-dependent part is built (used for derivatives).
inline ProjectionMatrices tilde_projections(const RhoDelta& rd, bool constant_blocks = true) {
  ProjectionMatrices pm{Eigen::MatrixXd::Zero(8, 16), Eigen::MatrixXd::Zero(8, 16)};
  const Eigen::Matrix2d Rp = Eigen::Vector2d(rd.rho1[0], rd.rho2[0]).asDiagonal();
  const Eigen::Matrix2d Rm = Eigen::Vector2d(rd.rho1[1], rd.rho2[1]).asDiagonal();
  const Eigen::Matrix2d Dp = Eigen::Vector2d(rd.delta1[0], rd.delta2[0]).asDiagonal();
  const Eigen::Matrix2d Dm = Eigen::Vector2d(rd.delta1[1], rd.delta2[1]).asDiagonal();
  Eigen::Matrix4d J4 = Eigen::Matrix4d::Zero();
  J4.topRightCorner<2, 2>() = Eigen::Matrix2d::Identity();
  J4.bottomLeftCorner<2, 2>() = -Eigen::Matrix2d::Identity();
  auto fill = [&](Eigen::MatrixXd& L, double sg) {
    // sg = -1 for the stable matrix, +1 for the unstable one
    Eigen::Matrix4d a, c;
    a << sg * Rp, sg * Dp, -sg * Dp, sg * Rp;
    c << -sg * Dp, sg * Rp, -sg * Rp, -sg * Dp;
    L.block<4, 4>(0, 0) = a;
    L.block<4, 4>(0, 8) = c;
    Eigen::Matrix4d e, g;
    e << sg * Rm, -sg * Dm, sg * Dm, sg * Rm;
    g << -sg * Dm, -sg * Rm, sg * Rm, -sg * Dm;
    L.block<4, 4>(4, 0) = e;
    L.block<4, 4>(4, 8) = g;
    if (constant_blocks) {
      L.block<4, 4>(0, 4) = Eigen::Matrix4d::Identity();
      L.block<4, 4>(4, 4) = Eigen::Matrix4d::Identity();
      L.block<4, 4>(0, 12) = J4;
      L.block<4, 4>(4, 12) = -J4;
    }
  };
  fill(pm.stable, -1.0);
  fill(pm.unstable, 1.0);
  return pm;
}

// ---------------------------------------------------------------- generalized eigenfunction

namespace detail {

// sigma e/(2a) - d2/2 + (sigma e/a + d2) d1/(8a), with the small-d1 ratio
struct CornerEntry {
  double value, d_e, d_d1, d_d2, d_a;
};

inline CornerEntry corner_entry(double sigma, double e, double d1, double d2, double a) {
  CornerEntry c;
  c.value = sigma * e / (2 * a) - 0.5 * d2 + sigma * e * d1 / (8 * a * a) + d2 * d1 / (8 * a);
  c.d_e = sigma / (2 * a) + sigma * d1 / (8 * a * a);
  c.d_d1 = sigma * e / (8 * a * a) + d2 / (8 * a);
  c.d_d2 = -0.5 + d1 / (8 * a);
  c.d_a = -sigma * e / (2 * a * a) - sigma * e * d1 / (4 * a * a * a) - d2 * d1 / (8 * a * a);
  return c;
}

}  // namespace detail

/// 4x8 matrices acting on (z, eta); `which` selects a parameter derivative.
inline ProjectionMatrices hat_projections(const Eigen::VectorXd& p, int which = -1) {
  const double omega = p[OMEGA], s = p[S], d1 = p[D1], d2 = p[D2], eps1 = p[EPS1], eps2 = p[EPS2];
  const double a1 = std::sqrt(omega), a2 = std::sqrt(s);
  const double e1 = eps1 * (1 - eps2), e2 = eps1 * eps2;
  ProjectionMatrices pm{Eigen::MatrixXd::Zero(4, 8), Eigen::MatrixXd::Zero(4, 8)};
  for (int k = 0; k < 2; ++k) {
    Eigen::MatrixXd& L = k == 0 ? pm.stable : pm.unstable;
    const double sg = k == 0 ? -1.0 : 1.0;
    const auto r1 = detail::root_entry(omega, d1, sg);
    const auto r2 = detail::root_entry(s, d1, sg);
    const auto c31 = detail::corner_entry(sg, e1, d1, d2, a1);
    const auto c42 = detail::corner_entry(sg, e2, d1, d2, a2);
    switch (which) {
      case -1:
        L(0, 0) = r1.value;
        L(1, 1) = r2.value;
        L(0, 2) = 1.0;
        L(1, 3) = 1.0;
        L(2, 0) = c31.value;
        L(3, 1) = c42.value;
        L(2, 4) = sg * a1;
        L(3, 5) = sg * a2;
        L(2, 6) = 1.0;
        L(3, 7) = 1.0;
        break;
      case OMEGA:
        L(0, 0) = r1.d_w;
        L(2, 0) = c31.d_a * 0.5 / a1;
        L(2, 4) = sg * 0.5 / a1;
        break;
      case S:
        L(1, 1) = r2.d_w;
        L(3, 1) = c42.d_a * 0.5 / a2;
        L(3, 5) = sg * 0.5 / a2;
        break;
      case D1:
        L(0, 0) = r1.d_d1;
        L(1, 1) = r2.d_d1;
        L(2, 0) = c31.d_d1;
        L(3, 1) = c42.d_d1;
        break;
      case D2:
        L(2, 0) = c31.d_d2;
        L(3, 1) = c42.d_d2;
        break;
      case EPS1:
        L(2, 0) = c31.d_e * (1 - eps2);
        L(3, 1) = c42.d_e * eps2;
        break;
      case EPS2:
        L(2, 0) = c31.d_e * (-eps1);
        L(3, 1) = c42.d_e * eps1;
        break;
      default: break;
    }
  }
  return pm;
}

}  // namespace cnls::systems
