#pragma once

// Pseudo-arclength continuation in one principal parameter. The unknown
// vector is (point values, free parameters, principal parameter) with the
// weighted inner product <a, b> = sum_j w_j a_j b_j, w = h_i / m for the
// values of interval i and 1 for parameters.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "cnls/bvp/abd_solver.hpp"
#include "cnls/bvp/assembly.hpp"
#include "cnls/bvp/newton.hpp"
#include "cnls/errors.hpp"

namespace cnls::cont {

using bvp::BvpSystem;
using bvp::CollocationSolution;

enum class SpecialKind { FOLD, BRANCH_SEED, USER_EVENT };

inline const char* to_string(SpecialKind k) {
  switch (k) {
    case SpecialKind::FOLD: return "FOLD";
    case SpecialKind::BRANCH_SEED: return "BRANCH_SEED";
    default: return "USER_EVENT";
  }
}

struct BranchPoint {
  CollocationSolution solution;
  std::string principal;
  double principal_value = 0.0;
  std::map<std::string, double> diagnostics;
  int step_index = 0;
  double arclength = 0.0;
  Eigen::VectorXd tangent;  // packed over (free parameters, principal)
  std::string special;      // empty, or the label of a special point
  int newton_iterations = 0;
};

struct SpecialPoint {
  SpecialKind kind = SpecialKind::USER_EVENT;
  std::string label;
  BranchPoint location;
  double detector_value = 0.0;
  double bracket_lo = 0.0, bracket_hi = 0.0;  // detector at the bracketing points
  int bisections = 0;
};

struct Branch {
  std::vector<BranchPoint> points;
  std::vector<SpecialPoint> specials;
  std::vector<std::string> warnings;
  std::string stop_reason;
};

using DiagnosticsFunction = std::function<std::map<std::string, double>(const CollocationSolution&)>;

/// Scalar monitored along the branch; a sign change between two accepted
/// points is located on the arclength.
struct Event {
  std::string name;
  std::function<double(const BranchPoint&)> detector;
  double tolerance = 1e-10;
  bool terminal = false;
};

struct ContinuationSettings {
  double initial_step = 0.05;
  double min_step = 1e-6;
  double max_step = 1.0;
  int max_steps = 500;
  int direction = 1;
  std::optional<double> target;  // stop when the principal parameter reaches this value
  bool detect_folds = true;
  double fold_tolerance = 1e-8;
  int max_bisections = 60;
  int fast_iterations = 3;  // corrector iterations at or below which the step doubles
  double min_tangent_cos = 0.9;
  double boundary_health = 1e-2;  // |z(x+-)| bound for the warning diagnostic
  bool update_reference = true;
  bvp::NewtonSettings newton{1e-10, 8, 1.0, 6};
  // optional orientation of the first tangent: the tangent is flipped so that
  // orient(t, point) * direction > 0 (default: principal component)
  std::function<double(const Eigen::VectorXd&, const BranchPoint&)> orient;
  std::vector<Event> events;
  DiagnosticsFunction diagnostics;

  void validate() const {
    if (!(min_step > 0.0 && min_step <= initial_step && initial_step <= max_step))
      throw ConfigError("ContinuationSettings: need 0 < min_step <= initial_step <= max_step");
    if (max_steps < 1) throw ConfigError("ContinuationSettings: max_steps must be positive");
    if (direction != 1 && direction != -1) throw ConfigError("ContinuationSettings: direction must be +1 or -1");
    newton.validate();
  }
};

// ---------------------------------------------------------------- helpers

/// Active parameter indices: the system's free parameters then the principal.
inline std::vector<int> continuation_active(const BvpSystem& sys, int principal) {
  auto act = sys.free_indices();
  for (int a : act)
    if (a == principal) throw ConfigError(sys.name + ": principal parameter is also free");
  act.push_back(principal);
  return act;
}

inline Eigen::VectorXd arclength_weights(const CollocationSolution& sol, int active_count) {
  const int n = sol.state_dim, m = sol.mesh.collocation_degree;
  Eigen::VectorXd w(sol.values.size() + active_count);
  for (int j = 0; j < sol.point_count(); ++j) {
    const int i = std::min(j / m, sol.mesh.interval_count - 1);
    w.segment(static_cast<Eigen::Index>(j) * n, n).setConstant(sol.mesh.width(i) / m);
  }
  w.tail(active_count).setOnes();
  return w;
}

inline double weighted_norm(const Eigen::VectorXd& v, const Eigen::VectorXd& w) {
  return std::sqrt((v.array().square() * w.array()).sum());
}

/// Unit tangent at a converged solution: null vector of the Jacobian with the
/// principal parameter appended, normalized in the weighted norm. With a
/// previous tangent the bordering row keeps the orientation continuous;
/// without one, candidate border rows are tried in turn.
inline Eigen::VectorXd tangent(const BvpSystem& sys, const CollocationSolution& sol, int principal,
                               const Eigen::VectorXd* previous = nullptr) {
  const auto active = continuation_active(sys, principal);
  const Eigen::VectorXd w = arclength_weights(sol, static_cast<int>(active.size()));
  bvp::BorderedAbdMatrix J = bvp::assemble_jacobian(sys, sol, active, 1);
  const int u = J.unknowns();
  Eigen::MatrixXd rhs = Eigen::MatrixXd::Zero(J.equations(), 1);
  rhs(J.equations() - 1, 0) = 1.0;
  auto attempt = [&](const Eigen::VectorXd& row) -> std::optional<Eigen::VectorXd> {
    J.dense.row(J.dense.rows() - 1) = row.transpose();
    try {
      Eigen::VectorXd t = bvp::solve(J, rhs).col(0);
      if (!t.allFinite()) return std::nullopt;
      return Eigen::VectorXd(t / weighted_norm(t, w));
    } catch (const SingularJacobianError&) {
      return std::nullopt;
    }
  };
  if (previous) {
    if (previous->size() != u) throw DimensionError("tangent: previous tangent has wrong size");
    if (auto t = attempt(previous->cwiseProduct(w))) return *t;
    throw SingularJacobianError(sys.name + ": bordered Jacobian is singular, no tangent");
  }
  std::vector<int> order;
  for (int k = static_cast<int>(active.size()) - 1; k >= 0; --k) order.push_back(J.value_unknowns() + k);
  for (int idx : order) {
    Eigen::VectorXd row = Eigen::VectorXd::Zero(u);
    row[idx] = 1.0;
    if (auto t = attempt(row)) return *t;
  }
  // deterministic dense fallback
  Eigen::VectorXd row(u);
  for (int i = 0; i < u; ++i) row[i] = std::sin(1.0 + 0.7 * i);
  if (auto t = attempt(row)) return *t;
  throw SingularJacobianError(sys.name + ": Jacobian is rank deficient, no tangent");
}

namespace detail {

inline std::map<std::string, double> default_diagnostics(const CollocationSolution& sol) {
  std::map<std::string, double> d;
  const int k = std::min(sol.state_dim, 4);
  d["z_minus"] = sol.left_state().head(k).norm();
  d["z_plus"] = sol.right_state().head(k).norm();
  for (int c = 0; c < std::min(sol.state_dim, 2); ++c)
    d[c == 0 ? "norm_U" : "norm_V"] = bvp::component_l2_norm(sol, c);
  return d;
}

}  // namespace detail

/// Pseudo-arclength corrector from `base` along `t` with step ds.
inline bvp::NewtonResult correct_step(const BvpSystem& sys, const CollocationSolution& base, int principal,
                                      const Eigen::VectorXd& t, double ds, const bvp::NewtonSettings& ns) {
  const auto free_active = sys.free_indices();
  std::vector<int> active = free_active;
  active.push_back(principal);
  const Eigen::VectorXd x0 = bvp::pack(base, active);
  const Eigen::VectorXd w = arclength_weights(base, static_cast<int>(active.size()));
  const Eigen::VectorXd wt = w.cwiseProduct(t);
  bvp::ExtraEquations extra;
  extra.unknowns = {principal};
  extra.count = 1;
  extra.evaluate = [&](const CollocationSolution& s, const std::vector<int>& act, Eigen::VectorXd& r,
                       Eigen::MatrixXd& rows) {
    const Eigen::VectorXd x = bvp::pack(s, act);
    r.resize(1);
    r[0] = wt.dot(x - x0) - ds;
    if (rows.size() > 0) rows.row(0) = wt.transpose();
  };
  CollocationSolution guess = base;
  bvp::unpack(x0 + ds * t, active, guess);
  return bvp::solve_newton(sys, guess, ns, &extra);
}

/// Natural-parameter solve with the principal parameter fixed at `value`.
inline bvp::NewtonResult solve_at(const BvpSystem& sys, CollocationSolution guess, int principal, double value,
                                  const bvp::NewtonSettings& ns) {
  guess.parameters[principal] = value;
  return bvp::solve_newton(sys, guess, ns);
}

// ---------------------------------------------------------------- continuation

class Continuation {
 public:
  Continuation(BvpSystem sys, const std::string& principal, ContinuationSettings settings)
      : sys_(std::move(sys)), settings_(std::move(settings)) {
    settings_.validate();
    principal_ = sys_.parameter_index(principal);
    principal_name_ = principal;
    if (!settings_.diagnostics) settings_.diagnostics = detail::default_diagnostics;
    if (settings_.target) {
      const double target = *settings_.target;
      const int pi = principal_;
      settings_.events.push_back(
          {"TARGET", [target, pi](const BranchPoint& p) { return p.solution.parameters[pi] - target; }, 1e-11,
           true});
    }
  }

  const BvpSystem& system() const { return sys_; }

  BranchPoint make_point(const CollocationSolution& sol, const Eigen::VectorXd& t, int step, double s) const {
    BranchPoint p;
    p.solution = sol;
    p.principal = principal_name_;
    p.principal_value = sol.parameters[principal_];
    p.diagnostics = settings_.diagnostics(sol);
    p.step_index = step;
    p.arclength = s;
    p.tangent = t;
    return p;
  }

  /// Continue from a converged start. Points are appended to `branch` as they
  /// are accepted, so a StallError leaves the partial branch in place.
  void run(const CollocationSolution& start, Branch& branch) {
    set_reference(start);
    Eigen::VectorXd t = tangent(sys_, start, principal_);
    BranchPoint first = make_point(start, t, 0, 0.0);
    const double o = settings_.orient ? settings_.orient(t, first) : t[t.size() - 1];
    if (o * settings_.direction < 0) t = -t;
    first.tangent = t;
    accept(branch, std::move(first));
    double ds = settings_.initial_step;
    int step = 0;
    while (step < settings_.max_steps) {
      const BranchPoint& a = branch.points.back();
      bvp::NewtonResult res;
      Eigen::VectorXd tb;
      bool ok = false;
      while (!ok) {
        try {
          res = correct_step(sys_, a.solution, principal_, a.tangent, ds, settings_.newton);
          tb = tangent(sys_, res.solution, principal_, &a.tangent);
          const Eigen::VectorXd w = arclength_weights(a.solution, static_cast<int>(tb.size() - a.solution.values.size()));
          const double cosang = (w.cwiseProduct(a.tangent)).dot(tb);
          ok = cosang >= settings_.min_tangent_cos || ds <= settings_.min_step;
        } catch (const ConvergenceError&) {
        } catch (const SingularJacobianError&) {
        } catch (const DegenerateProjectionError&) {
        }
        if (!ok) {
          ds *= 0.5;
          if (ds < settings_.min_step) {
            branch.stop_reason = "stall";
            throw StallError(sys_.name + ": continuation step fell below min_step at " + principal_name_ + " = " +
                                 std::to_string(a.principal_value),
                             a.principal_value);
          }
        }
      }
      ++step;
      BranchPoint b = make_point(res.solution, tb, step, a.arclength + ds);
      b.newton_iterations = res.iterations;
      const bool stop = handle_specials(branch, branch.points.back(), b, ds);
      if (stop) {
        branch.stop_reason = "target";
        return;
      }
      accept(branch, std::move(b));
      if (res.iterations <= settings_.fast_iterations) ds = std::min(2 * ds, settings_.max_step);
    }
    branch.stop_reason = "max_steps";
  }

  Branch run(const CollocationSolution& start) {
    Branch b;
    run(start, b);
    return b;
  }

 private:
  void set_reference(const CollocationSolution& sol) {
    bool needed = false;
    for (const auto& ic : sys_.integral_conditions) needed = needed || ic.uses_reference;
    if (needed && (settings_.update_reference || !sys_.reference))
      sys_.reference = std::make_shared<const CollocationSolution>(sol);
  }

  void accept(Branch& branch, BranchPoint p) {
    const double zm = p.diagnostics.count("z_minus") ? p.diagnostics.at("z_minus") : 0.0;
    const double zp = p.diagnostics.count("z_plus") ? p.diagnostics.at("z_plus") : 0.0;
    if (std::max(zm, zp) > settings_.boundary_health) {
      p.diagnostics["boundary_warning"] = 1.0;
      branch.warnings.push_back(sys_.name + ": |z(x+-)| = " + std::to_string(std::max(zm, zp)) + " at " +
                                principal_name_ + " = " + std::to_string(p.principal_value));
    }
    set_reference(p.solution);
    branch.points.push_back(std::move(p));
  }

  // Point at arclength s from a along its tangent, with its own tangent.
  BranchPoint point_at(const BranchPoint& a, double s) const {
    auto res = correct_step(sys_, a.solution, principal_, a.tangent, s, settings_.newton);
    Eigen::VectorXd t = tangent(sys_, res.solution, principal_, &a.tangent);
    BranchPoint p = make_point(res.solution, t, a.step_index, a.arclength + s);
    p.newton_iterations = res.iterations;
    return p;
  }

  struct Located {
    double s;
    SpecialPoint sp;
    bool terminal;
  };

  // Returns true if a terminal event was located (branch ends there).
  bool handle_specials(Branch& branch, const BranchPoint& a, const BranchPoint& b, double ds) {
    std::vector<Located> found;
    const int pc = static_cast<int>(a.tangent.size()) - 1;
    if (settings_.detect_folds && a.tangent[pc] * b.tangent[pc] < 0) {
      double lo = 0, hi = ds, flo = a.tangent[pc], fhi = b.tangent[pc];
      SpecialPoint sp;
      sp.kind = SpecialKind::FOLD;
      sp.label = "FOLD";
      sp.bracket_lo = flo;
      sp.bracket_hi = fhi;
      int it = 0;
      for (;; ++it) {
        if (it >= settings_.max_bisections)
          throw ConvergenceError(sys_.name + ": fold localization failed", it, std::min(std::abs(flo), std::abs(fhi)));
        const double mid = 0.5 * (lo + hi);
        BranchPoint p = point_at(a, mid);
        const double f = p.tangent[pc];
        if (std::abs(f) < settings_.fold_tolerance) {
          sp.location = std::move(p);
          sp.detector_value = f;
          break;
        }
        if ((f < 0) == (flo < 0)) {
          lo = mid;
          flo = f;
        } else {
          hi = mid;
          fhi = f;
        }
      }
      sp.bisections = it + 1;
      sp.location.special = "FOLD";
      const double s = sp.location.arclength - a.arclength;
      found.push_back({s, std::move(sp), false});
    }
    for (const auto& ev : settings_.events) {
      const double ga = ev.detector(a), gb = ev.detector(b);
      if (ga == 0.0 || !((ga < 0) != (gb < 0) || gb == 0.0)) continue;
      // Illinois iteration on the arclength
      double lo = 0, hi = ds, flo = ga, fhi = gb;
      SpecialPoint sp;
      sp.kind = SpecialKind::USER_EVENT;
      sp.label = ev.name;
      sp.bracket_lo = ga;
      sp.bracket_hi = gb;
      BranchPoint p = b;
      double f = gb;
      int side = 0, it = 0;
      for (; std::abs(f) > ev.tolerance; ++it) {
        if (it >= settings_.max_bisections)
          throw ConvergenceError(sys_.name + ": event '" + ev.name + "' localization failed", it, std::abs(f));
        double s = (lo * fhi - hi * flo) / (fhi - flo);
        if (!(s > lo && s < hi)) s = 0.5 * (lo + hi);
        p = point_at(a, s);
        f = ev.detector(p);
        if ((f < 0) == (flo < 0)) {
          lo = s;
          flo = f;
          if (side == -1) fhi *= 0.5;
          side = -1;
        } else {
          hi = s;
          fhi = f;
          if (side == 1) flo *= 0.5;
          side = 1;
        }
      }
      sp.bisections = it;
      sp.detector_value = f;
      sp.location = std::move(p);
      sp.location.special = ev.name;
      found.push_back({sp.location.arclength - a.arclength, std::move(sp), ev.terminal});
    }
    std::sort(found.begin(), found.end(), [](const Located& x, const Located& y) { return x.s < y.s; });
    for (auto& f : found) {
      branch.specials.push_back(f.sp);
      BranchPoint loc = f.sp.location;
      loc.step_index = b.step_index;
      accept(branch, std::move(loc));
      if (f.terminal) return true;
    }
    return false;
  }

  BvpSystem sys_;
  ContinuationSettings settings_;
  int principal_ = -1;
  std::string principal_name_;
};

inline Branch continue_branch(const BvpSystem& sys, const CollocationSolution& start, const std::string& principal,
                              const ContinuationSettings& settings) {
  Continuation c(sys, principal, settings);
  return c.run(start);
}

}  // namespace cnls::cont
