#pragma once

// Closed-form quantities for the coupled NLS system around the fundamental
// wave (U0, 0): kernel modes, critical couplings and embedded eigenvalues.

#include <cmath>
#include <string>
#include <vector>

#include "cnls/errors.hpp"

namespace cnls::analytic {

struct ModelParams {
  double omega = 1.0;
  double s = 4.0;
  double beta1 = 0.0;
  double beta2 = 2.0;

  void validate() const {
    if (!(omega > 0.0) || !(s > 0.0))
      throw DomainError("ModelParams: omega and s must be positive");
  }
};

struct EmbeddedEigenvalue {
  int k = 0;
  double lambda_imag = 0.0;  // positive-imaginary representative, |lambda|
  bool embedded = false;     // |lambda| >= min(omega, s)
};

/// Terminating Gauss hypergeometric series 2F1(-k, b; c; z).
///
/// The Pochhammer symbols are accumulated as running products so that the
/// nonpositive first argument never goes through a Gamma ratio.
inline double hyp2f1_terminating(int k_neg, double b, double c, double z) {
  if (k_neg < 0) throw DomainError("hyp2f1_terminating: k_neg must be >= 0");
  double term = 1.0;
  double sum = 1.0;
  for (int j = 0; j < k_neg; ++j) {
    const double denom = (c + j) * (j + 1);
    if (c + j == 0.0)
      throw DomainError("hyp2f1_terminating: (c)_j vanishes at j = " + std::to_string(j + 1));
    term *= (-k_neg + j) * (b + j) * z / denom;
    sum += term;
  }
  return sum;
}

inline double sech(double x) { return 1.0 / std::cosh(x); }

/// U0(x) = sqrt(2 omega) sech(sqrt(omega) x).
inline double fundamental_profile(double x, double omega) {
  if (!(omega > 0.0)) throw DomainError("fundamental_profile: omega must be positive");
  return std::sqrt(2.0 * omega) * sech(std::sqrt(omega) * x);
}

inline double fundamental_profile_dx(double x, double omega) {
  const double r = std::sqrt(omega);
  return -std::sqrt(2.0 * omega) * r * sech(r * x) * std::tanh(r * x);
}

/// beta1^(l) = (sqrt(s/omega) + l)(sqrt(s/omega) + l + 1) / 2.
inline double critical_coupling(double omega, double s, int ell) {
  if (!(omega > 0.0) || !(s > 0.0)) throw DomainError("critical_coupling: omega, s must be positive");
  if (ell < 0) throw DomainError("critical_coupling: ell must be >= 0");
  const double r = std::sqrt(s / omega);
  return (r + ell) * (r + ell + 1.0) / 2.0;
}

/// kappa = (-1 + sqrt(1 + 8 beta1)) / 2, the positive root of kappa(kappa+1)/2 = beta1.
inline double kappa(double beta1) {
  if (!(beta1 > 0.0)) throw DomainError("kappa: beta1 must be positive");
  return (-1.0 + std::sqrt(1.0 + 8.0 * beta1)) / 2.0;
}

inline double essential_spectrum_gap(const ModelParams& p) {
  p.validate();
  return std::min(p.omega, p.s);
}

/// Sech-hypergeometric profile shared by the kernel mode V1 and the embedded
/// eigenfunctions: sech^a(X) [tanh X] 2F1(-n', a + n' + 1/2 [+1]; a + 1; sech^2 X).
inline double sech_hypergeometric_mode(double scaled_x, double exponent, int index) {
  const double sh = sech(scaled_x);
  const int half = index / 2;
  if (index % 2 == 0) {
    return std::pow(sh, exponent) *
           hyp2f1_terminating(half, exponent + half + 0.5, exponent + 1.0, sh * sh);
  }
  return std::pow(sh, exponent) * std::tanh(scaled_x) *
         hyp2f1_terminating(half, exponent + half + 1.5, exponent + 1.0, sh * sh);
}

/// Bounded solution V1^(l) of -V'' + sV - beta1^(l) U0^2 V = 0.
inline double kernel_mode_V1(double x, double omega, double s, int ell) {
  if (!(omega > 0.0) || !(s > 0.0)) throw DomainError("kernel_mode_V1: omega, s must be positive");
  if (ell < 0) throw DomainError("kernel_mode_V1: ell must be >= 0");
  return sech_hypergeometric_mode(std::sqrt(omega) * x, std::sqrt(s / omega), ell);
}

/// Psi(x) of the embedded eigenfunction (0, Psi, 0, +-i Psi) with mode index k.
inline double embedded_eigenfunction_Psi(double x, double omega, double kappa_value, int k) {
  if (!(omega > 0.0)) throw DomainError("embedded_eigenfunction_Psi: omega must be positive");
  if (k < 0 || !(kappa_value - k > 0.0))
    throw DomainError("embedded_eigenfunction_Psi: need 0 <= k < kappa");
  return sech_hypergeometric_mode(std::sqrt(omega) * x, kappa_value - k, k);
}

namespace detail {

inline std::vector<EmbeddedEigenvalue> eigenvalues_for_kappa(double omega, double s,
                                                             double kappa_value) {
  std::vector<EmbeddedEigenvalue> out;
  const double gap = std::min(omega, s);
  const int kmax = static_cast<int>(std::floor(kappa_value + 1e-12));
  for (int k = 0; k <= kmax; ++k) {
    if (std::abs(kappa_value - k) < 1e-12) continue;
    const double d = kappa_value - k;
    EmbeddedEigenvalue ev;
    ev.k = k;
    ev.lambda_imag = std::abs(s - omega * d * d);
    ev.embedded = ev.lambda_imag >= gap;
    out.push_back(ev);
  }
  return out;
}

}  // namespace detail

/// Point eigenvalues of JL around (U0, 0), one positive-imaginary
/// representative per admissible k.
inline std::vector<EmbeddedEigenvalue> embedded_eigenvalues(const ModelParams& p) {
  p.validate();
  return detail::eigenvalues_for_kappa(p.omega, p.s, kappa(p.beta1));
}

/// Same as embedded_eigenvalues at beta1 = beta1^(l), indexed by l.
inline std::vector<EmbeddedEigenvalue> onset_eigenvalues(double omega, double s, int ell) {
  ModelParams p{omega, s, 0.0, 0.0};
  p.validate();
  if (ell < 0) throw DomainError("onset_eigenvalues: ell must be >= 0");
  return detail::eigenvalues_for_kappa(omega, s, std::sqrt(s / omega) + ell);
}

}  // namespace cnls::analytic
