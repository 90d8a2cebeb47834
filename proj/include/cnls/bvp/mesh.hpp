#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "cnls/errors.hpp"
#include "cnls/quadrature.hpp"

namespace cnls::bvp {

/// Truncated interval [x_minus, x_plus] split into collocation intervals.
struct Mesh {
  double x_minus = -1.0;
  double x_plus = 1.0;
  int interval_count = 1;      // NTST
  int collocation_degree = 4;  // NCOL
  std::vector<double> node_positions;

  static Mesh uniform(double x_minus, double x_plus, int intervals, int degree) {
    Mesh m;
    m.x_minus = x_minus;
    m.x_plus = x_plus;
    m.interval_count = intervals;
    m.collocation_degree = degree;
    m.node_positions.resize(intervals + 1);
    for (int i = 0; i <= intervals; ++i)
      m.node_positions[i] = x_minus + (x_plus - x_minus) * static_cast<double>(i) / intervals;
    m.node_positions.back() = x_plus;
    m.validate();
    return m;
  }

  void validate() const {
    if (!(x_minus < 0.0 && 0.0 < x_plus))
      throw DimensionError("Mesh: need x_minus < 0 < x_plus");
    if (interval_count < 1) throw DimensionError("Mesh: interval_count must be positive");
    if (collocation_degree < 2 || collocation_degree > 7)
      throw DimensionError("Mesh: collocation_degree must lie in [2, 7]");
    if (static_cast<int>(node_positions.size()) != interval_count + 1)
      throw DimensionError("Mesh: node count does not match interval_count");
    if (node_positions.front() != x_minus || node_positions.back() != x_plus)
      throw DimensionError("Mesh: nodes must start at x_minus and end at x_plus");
    for (int i = 0; i < interval_count; ++i)
      if (!(node_positions[i] < node_positions[i + 1]))
        throw DimensionError("Mesh: nodes must be strictly increasing");
  }

  double width(int i) const { return node_positions[i + 1] - node_positions[i]; }
  int point_count() const { return interval_count * collocation_degree + 1; }

  bool same_as(const Mesh& o) const {
    return collocation_degree == o.collocation_degree && node_positions == o.node_positions;
  }
};

/// Per-degree constants: Lobatto representation points, Gauss collocation
/// points and the Lagrange basis evaluated at the latter.
struct CollocationTables {
  int degree = 0;
  std::vector<double> rep_points;  // m + 1 Lobatto points on [0, 1]
  QuadratureRule gauss;            // m Gauss points on [0, 1]
  Eigen::MatrixXd basis;           // basis(c, j) = L_j(tau_c)
  Eigen::MatrixXd basis_dt;        // basis_dt(c, j) = L_j'(tau_c)

  explicit CollocationTables(int m)
      : degree(m), rep_points(gauss_lobatto_points(m)), gauss(gauss_legendre(m)) {
    basis.resize(m, m + 1);
    basis_dt.resize(m, m + 1);
    for (int c = 0; c < m; ++c) {
      Eigen::VectorXd v(m + 1), d(m + 1);
      evaluate(gauss.nodes[c], v, d);
      basis.row(c) = v.transpose();
      basis_dt.row(c) = d.transpose();
    }
  }

  /// Lagrange basis values and tau-derivatives at an arbitrary tau.
  void evaluate(double tau, Eigen::Ref<Eigen::VectorXd> value,
                Eigen::Ref<Eigen::VectorXd> deriv) const {
    const int m = degree;
    for (int j = 0; j <= m; ++j) {
      double p = 1.0, dp = 0.0;
      for (int k = 0; k <= m; ++k) {
        if (k == j) continue;
        const double inv = 1.0 / (rep_points[j] - rep_points[k]);
        dp = dp * (tau - rep_points[k]) * inv + p * inv;
        p *= (tau - rep_points[k]) * inv;
      }
      value[j] = p;
      deriv[j] = dp;
    }
  }

  static const CollocationTables& get(int m) {
    static const std::vector<CollocationTables> cache = [] {
      std::vector<CollocationTables> t;
      for (int d = 0; d <= 7; ++d) t.emplace_back(d < 2 ? 2 : d);
      return t;
    }();
    if (m < 2 || m > 7) throw DimensionError("collocation degree must lie in [2, 7]");
    return cache[m];
  }
};

}  // namespace cnls::bvp
