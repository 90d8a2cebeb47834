#pragma once

// Independent spectrum check: the V-block -d^2/dx^2 + s - beta1 U0^2 of the
// linearization at the fundamental wave, discretized with the five-point
// stencil on a uniform grid (Dirichlet outside) and handed to LAPACK's
// banded symmetric eigensolver.

#include <cmath>
#include <vector>

#include <lapacke.h>

#include "cnls/analytic/formulas.hpp"
#include "cnls/errors.hpp"

namespace cnls::runner {

struct FdSpectrum {
  std::vector<double> computed;  // lowest eigenvalues, ascending
  std::vector<double> exact;     // s - omega (kappa - k)^2, k < kappa
  double max_error = 0.0;
};

/// Lowest `count` eigenvalues of the banded FD operator on [-x_max, x_max]
/// with `points` interior grid points.
inline std::vector<double> fd_lowest_eigenvalues(const analytic::ModelParams& model, double x_max, int points,
                                                 int count) {
  if (points < 10 || count < 1 || count > points) throw DomainError("fd_lowest_eigenvalues: bad sizes");
  const int n = points, kd = 2, ldab = kd + 1;
  const double h = 2.0 * x_max / (n + 1);
  const double c = 1.0 / (12.0 * h * h);
  std::vector<double> ab(static_cast<std::size_t>(ldab) * n, 0.0);
  // column-major upper band: ab[kd + i - j + j*ldab] = A(i, j)
  for (int j = 0; j < n; ++j) {
    const double x = -x_max + (j + 1) * h;
    const double u0 = analytic::fundamental_profile(x, model.omega);
    ab[kd + j * ldab] = 30.0 * c + model.s - model.beta1 * u0 * u0;
    if (j >= 1) ab[kd - 1 + j * ldab] = -16.0 * c;
    if (j >= 2) ab[kd - 2 + j * ldab] = 1.0 * c;
  }
  std::vector<double> w(n), q(1), z(1);
  std::vector<lapack_int> ifail(n);
  lapack_int found = 0;
  const lapack_int info = LAPACKE_dsbevx(LAPACK_COL_MAJOR, 'N', 'I', 'U', n, kd, ab.data(), ldab, q.data(), 1,
                                         0.0, 0.0, 1, count, 2 * LAPACKE_dlamch('S'), &found, w.data(), z.data(),
                                         1, ifail.data());
  if (info != 0) throw Error("dsbevx failed with info " + std::to_string(info));
  return {w.begin(), w.begin() + found};
}

/// Point spectrum of the V-block compared with s - omega (kappa - k)^2.
inline FdSpectrum fd_spectrum_check(const analytic::ModelParams& model, double x_max = 20.0, int points = 4000) {
  model.validate();
  FdSpectrum r;
  const double kap = analytic::kappa(model.beta1);
  for (int k = 0; k < kap - 1e-12; ++k) r.exact.push_back(model.s - model.omega * (kap - k) * (kap - k));
  if (r.exact.empty()) throw DomainError("fd_spectrum_check: no bound states");
  r.computed = fd_lowest_eigenvalues(model, x_max, points, static_cast<int>(r.exact.size()));
  if (r.computed.size() != r.exact.size()) throw Error("fd_spectrum_check: eigenvalue count mismatch");
  for (std::size_t i = 0; i < r.exact.size(); ++i)
    r.max_error = std::max(r.max_error, std::abs(r.computed[i] - r.exact[i]));
  return r;
}

}  // namespace cnls::runner
