#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "cnls/bvp/mesh.hpp"
#include "cnls/errors.hpp"

namespace cnls::bvp {

/// Named parameter vector. The index layout is fixed by the owning system.
struct ParameterSet {
  std::vector<std::string> names;
  Eigen::VectorXd values;

  ParameterSet() = default;
  explicit ParameterSet(std::vector<std::string> n)
      : names(std::move(n)), values(Eigen::VectorXd::Zero(static_cast<Eigen::Index>(names.size()))) {}

  int size() const { return static_cast<int>(names.size()); }

  int index(const std::string& name) const {
    auto it = std::find(names.begin(), names.end(), name);
    if (it == names.end()) throw DimensionError("unknown parameter '" + name + "'");
    return static_cast<int>(it - names.begin());
  }
  double get(const std::string& name) const { return values[index(name)]; }
  void set(const std::string& name, double v) { values[index(name)] = v; }
  double operator[](int i) const { return values[i]; }
  double& operator[](int i) { return values[i]; }
};

/// Piecewise polynomial of degree NCOL per interval, stored as Lagrange
/// values at the Lobatto points of every interval. Adjacent intervals share
/// their end point, which makes the representation continuous.
struct CollocationSolution {
  Mesh mesh;
  int state_dim = 0;
  Eigen::MatrixXd values;  // state_dim x mesh.point_count()
  ParameterSet parameters;

  CollocationSolution() = default;
  CollocationSolution(Mesh m, int n, ParameterSet p)
      : mesh(std::move(m)), state_dim(n), values(Eigen::MatrixXd::Zero(n, mesh.point_count())),
        parameters(std::move(p)) {}

  int point_count() const { return mesh.point_count(); }

  /// Position of representation point j (interval j / m, local index j % m).
  double point(int j) const {
    const int m = mesh.collocation_degree;
    const int i = std::min(j / m, mesh.interval_count - 1);
    const int local = j - i * m;
    const auto& t = CollocationTables::get(m).rep_points;
    return mesh.node_positions[i] + mesh.width(i) * t[local];
  }

  std::vector<double> points() const {
    std::vector<double> xs(point_count());
    for (int j = 0; j < point_count(); ++j) xs[j] = point(j);
    return xs;
  }

  /// Lagrange coefficients of interval i (state_dim x (m + 1)).
  auto interval_coefficients(int i) const {
    const int m = mesh.collocation_degree;
    return values.middleCols(i * m, m + 1);
  }

  Eigen::VectorXd left_state() const { return values.col(0); }
  Eigen::VectorXd right_state() const { return values.col(values.cols() - 1); }

  /// Fill values from a function of x evaluated at every representation point.
  void sample(const std::function<Eigen::VectorXd(double)>& f) {
    for (int j = 0; j < point_count(); ++j) values.col(j) = f(point(j));
  }

  void validate() const {
    mesh.validate();
    if (values.rows() != state_dim || values.cols() != mesh.point_count())
      throw DimensionError("CollocationSolution: value array does not match mesh/state_dim");
  }
};

/// Index of the interval containing x (right-closed on the last interval).
inline int locate_interval(const Mesh& mesh, double x) {
  auto it = std::upper_bound(mesh.node_positions.begin(), mesh.node_positions.end(), x);
  int i = static_cast<int>(it - mesh.node_positions.begin()) - 1;
  return std::clamp(i, 0, mesh.interval_count - 1);
}

inline Eigen::VectorXd interpolate(const CollocationSolution& sol, double x) {
  const Mesh& mesh = sol.mesh;
  if (!(x >= mesh.x_minus && x <= mesh.x_plus))
    throw DomainError("interpolate: x = " + std::to_string(x) + " outside [x_minus, x_plus]");
  const int m = mesh.collocation_degree;
  const int i = locate_interval(mesh, x);
  const double tau = (x - mesh.node_positions[i]) / mesh.width(i);
  const auto& tab = CollocationTables::get(m);
  Eigen::VectorXd l(m + 1), dl(m + 1);
  tab.evaluate(tau, l, dl);
  // exact at representation points
  for (int j = 0; j <= m; ++j)
    if (tau == tab.rep_points[j]) return sol.values.col(i * m + j);
  return sol.interval_coefficients(i) * l;
}

/// Derivative of the piecewise polynomial at x.
inline Eigen::VectorXd interpolate_derivative(const CollocationSolution& sol, double x) {
  const Mesh& mesh = sol.mesh;
  if (!(x >= mesh.x_minus && x <= mesh.x_plus))
    throw DomainError("interpolate_derivative: x outside [x_minus, x_plus]");
  const int m = mesh.collocation_degree;
  const int i = locate_interval(mesh, x);
  const double h = mesh.width(i);
  const auto& tab = CollocationTables::get(m);
  Eigen::VectorXd l(m + 1), dl(m + 1);
  tab.evaluate((x - mesh.node_positions[i]) / h, l, dl);
  return sol.interval_coefficients(i) * dl / h;
}

/// Weight function for integral_functional: (x, state) -> value.
using WeightFunction = std::function<double(double, const Eigen::VectorXd&)>;

/// Integral of weight(x, u(x)) over [x_minus, x_plus] with the m-point Gauss
/// rule of every interval.
inline double integral_functional(const CollocationSolution& sol, const WeightFunction& weight) {
  const Mesh& mesh = sol.mesh;
  const int m = mesh.collocation_degree;
  const auto& tab = CollocationTables::get(m);
  double total = 0.0;
  Eigen::VectorXd u(sol.state_dim);
  for (int i = 0; i < mesh.interval_count; ++i) {
    const double h = mesh.width(i);
    const auto coeff = sol.interval_coefficients(i);
    double acc = 0.0;
    for (int c = 0; c < m; ++c) {
      u.noalias() = coeff * tab.basis.row(c).transpose();
      acc += tab.gauss.weights[c] * weight(mesh.node_positions[i] + h * tab.gauss.nodes[c], u);
    }
    total += h * acc;
  }
  return total;
}

/// L2 norm of one state component.
inline double component_l2_norm(const CollocationSolution& sol, int component) {
  return std::sqrt(integral_functional(
      sol, [component](double, const Eigen::VectorXd& u) { return u[component] * u[component]; }));
}

/// Re-interpolate onto a new mesh. Points outside the old domain are filled
/// by exponential decay from the nearest boundary state, component j decaying
/// at rate decay_rates[j] (constant extension when no rates are given).
inline CollocationSolution remesh(const CollocationSolution& sol, const Mesh& new_mesh,
                                  const std::vector<double>& decay_rates = {}) {
  new_mesh.validate();
  if (!decay_rates.empty() && static_cast<int>(decay_rates.size()) != sol.state_dim)
    throw DimensionError("remesh: decay_rates size must equal state_dim");
  if (sol.mesh.same_as(new_mesh)) return sol;
  CollocationSolution out(new_mesh, sol.state_dim, sol.parameters);
  const Eigen::VectorXd left = sol.left_state(), right = sol.right_state();
  for (int j = 0; j < out.point_count(); ++j) {
    const double x = out.point(j);
    if (x < sol.mesh.x_minus || x > sol.mesh.x_plus) {
      const bool is_left = x < sol.mesh.x_minus;
      const double dist = is_left ? sol.mesh.x_minus - x : x - sol.mesh.x_plus;
      const Eigen::VectorXd& edge = is_left ? left : right;
      for (int k = 0; k < sol.state_dim; ++k) {
        const double rate = decay_rates.empty() ? 0.0 : decay_rates[k];
        out.values(k, j) = edge[k] * std::exp(-rate * dist);
      }
    } else {
      out.values.col(j) = interpolate(sol, x);
    }
  }
  return out;
}

}  // namespace cnls::bvp
