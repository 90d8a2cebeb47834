#pragma once

#include <cmath>
#include <functional>
#include <vector>

#include <Eigen/Dense>

#include "cnls/bvp/assembly.hpp"
#include "cnls/errors.hpp"

namespace cnls::bvp {

struct NewtonSettings {
  double residual_tol = 1e-10;
  int max_iterations = 20;
  double damping = 1.0;  // initial step fraction
  int max_halvings = 8;

  void validate() const {
    if (!(residual_tol > 0.0)) throw ConfigError("NewtonSettings: residual_tol must be positive");
    if (max_iterations < 1) throw ConfigError("NewtonSettings: max_iterations must be positive");
    if (!(damping > 0.0 && damping <= 1.0)) throw ConfigError("NewtonSettings: damping must lie in (0, 1]");
  }
};

/// Equations appended to a system for one solve, e.g. the pseudo-arclength
/// condition. `unknowns` are parameter indices solved for in addition to the
/// system's free parameters. `evaluate` fills the residual and the dense
/// Jacobian rows over the packed unknown vector.
struct ExtraEquations {
  std::vector<int> unknowns;
  int count = 0;
  std::function<void(const CollocationSolution& sol, const std::vector<int>& active, Eigen::VectorXd& r,
                     Eigen::MatrixXd& rows)>
      evaluate;
};

struct NewtonResult {
  CollocationSolution solution;
  int iterations = 0;
  double residual = 0.0;
  std::vector<double> history;  // max-norm residual before each step and at the end
};

inline std::vector<int> active_indices(const BvpSystem& sys, const ExtraEquations* extra) {
  std::vector<int> active = sys.free_indices();
  if (extra)
    for (int k : extra->unknowns) {
      for (int a : active)
        if (a == k) throw DimensionError("ExtraEquations: parameter already free");
      active.push_back(k);
    }
  return active;
}

/// Full residual including any extra equations.
inline Eigen::VectorXd full_residual(const BvpSystem& sys, const CollocationSolution& sol,
                                     const ExtraEquations* extra, const std::vector<int>& active) {
  Eigen::VectorXd r = assemble_residual(sys, sol);
  if (!extra || extra->count == 0) return r;
  Eigen::VectorXd e(extra->count);
  Eigen::MatrixXd rows;
  extra->evaluate(sol, active, e, rows);
  Eigen::VectorXd out(r.size() + e.size());
  out << r, e;
  return out;
}

inline BorderedAbdMatrix full_jacobian(const BvpSystem& sys, const CollocationSolution& sol,
                                       const ExtraEquations* extra, const std::vector<int>& active) {
  const int e = extra ? extra->count : 0;
  BorderedAbdMatrix J = assemble_jacobian(sys, sol, active, e);
  if (e > 0) {
    Eigen::VectorXd r(e);
    Eigen::MatrixXd rows(e, J.unknowns());
    extra->evaluate(sol, active, r, rows);
    if (rows.rows() != e || rows.cols() != J.unknowns())
      throw DimensionError("ExtraEquations: Jacobian rows have wrong shape");
    J.dense.bottomRows(e) = rows;
  }
  return J;
}

inline double max_norm(const Eigen::VectorXd& v) { return v.size() ? v.cwiseAbs().maxCoeff() : 0.0; }

/// Damped Newton iteration on the collocation system. Steps are halved while
/// the max-norm residual increases.
inline NewtonResult solve_newton(const BvpSystem& sys, const CollocationSolution& guess,
                                 const NewtonSettings& settings = {}, const ExtraEquations* extra = nullptr) {
  settings.validate();
  sys.validate();
  const std::vector<int> active = active_indices(sys, extra);
  NewtonResult res;
  res.solution = guess;
  Eigen::VectorXd r = full_residual(sys, res.solution, extra, active);
  double norm = max_norm(r);
  res.history.push_back(norm);
  while (!(norm < settings.residual_tol)) {
    if (res.iterations >= settings.max_iterations)
      throw ConvergenceError(sys.name + ": Newton did not converge", res.iterations, norm);
    const BorderedAbdMatrix J = full_jacobian(sys, res.solution, extra, active);
    const Eigen::VectorXd dx = solve(J, -r).col(0);
    const Eigen::VectorXd x0 = pack(res.solution, active);
    double lambda = settings.damping;
    CollocationSolution trial = res.solution;
    Eigen::VectorXd r_trial;
    double n_trial = 0.0;
    for (int halving = 0;; ++halving) {
      unpack(x0 + lambda * dx, active, trial);
      bool ok = true;
      try {
        r_trial = full_residual(sys, trial, extra, active);
        n_trial = max_norm(r_trial);
        ok = std::isfinite(n_trial);
      } catch (const DegenerateProjectionError&) {
        ok = false;
      }
      if (ok && (n_trial <= norm || halving >= settings.max_halvings)) break;
      if (!ok && halving >= settings.max_halvings)
        throw ConvergenceError(sys.name + ": Newton step left the admissible region", res.iterations, norm);
      lambda *= 0.5;
    }
    res.solution = std::move(trial);
    r = std::move(r_trial);
    norm = n_trial;
    ++res.iterations;
    res.history.push_back(norm);
  }
  res.residual = norm;
  return res;
}

}  // namespace cnls::bvp
