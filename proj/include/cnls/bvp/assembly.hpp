#pragma once

#include <algorithm>
#include <vector>

#include <Eigen/Dense>

#include "cnls/bvp/abd_solver.hpp"
#include "cnls/bvp/mesh.hpp"
#include "cnls/bvp/solution.hpp"
#include "cnls/bvp/system.hpp"

namespace cnls::bvp {

/// Packs the point values and the parameters listed in `active` into one vector.
inline Eigen::VectorXd pack(const CollocationSolution& sol, const std::vector<int>& active) {
  const Eigen::Index nv = sol.values.size();
  Eigen::VectorXd x(nv + static_cast<Eigen::Index>(active.size()));
  x.head(nv) = Eigen::Map<const Eigen::VectorXd>(sol.values.data(), nv);
  for (std::size_t a = 0; a < active.size(); ++a) x[nv + a] = sol.parameters[active[a]];
  return x;
}

inline void unpack(const Eigen::VectorXd& x, const std::vector<int>& active, CollocationSolution& sol) {
  const Eigen::Index nv = sol.values.size();
  if (x.size() != nv + static_cast<Eigen::Index>(active.size()))
    throw DimensionError("unpack: vector size mismatch");
  Eigen::Map<Eigen::VectorXd>(sol.values.data(), nv) = x.head(nv);
  for (std::size_t a = 0; a < active.size(); ++a) sol.parameters[active[a]] = x[nv + a];
}

namespace detail {

// Reference states at every Gauss point, interval-major (empty if unused).
inline Eigen::MatrixXd reference_at_gauss(const BvpSystem& sys, const Mesh& mesh) {
  bool needed = false;
  for (const auto& ic : sys.integral_conditions) needed = needed || ic.uses_reference;
  if (!needed || !sys.reference) return {};
  const auto& ref = *sys.reference;
  const int m = mesh.collocation_degree;
  const auto& tab = CollocationTables::get(m);
  Eigen::MatrixXd out(ref.state_dim, mesh.interval_count * m);
  const bool same = ref.mesh.same_as(mesh);
  for (int i = 0; i < mesh.interval_count; ++i)
    for (int c = 0; c < m; ++c) {
      if (same) {
        out.col(i * m + c) = ref.interval_coefficients(i) * tab.basis.row(c).transpose();
      } else {
        const double x = mesh.node_positions[i] + mesh.width(i) * tab.gauss.nodes[c];
        out.col(i * m + c) = interpolate(ref, std::clamp(x, ref.mesh.x_minus, ref.mesh.x_plus));
      }
    }
  return out;
}

}  // namespace detail

/// Residual: collocation defects u' - f at all Gauss points, then boundary
/// conditions, then integral conditions.
inline Eigen::VectorXd assemble_residual(const BvpSystem& sys, const CollocationSolution& sol) {
  sys.check_solution(sol);
  const Mesh& mesh = sol.mesh;
  const int n = sys.state_dim, N = mesh.interval_count, m = mesh.collocation_degree;
  const auto& tab = CollocationTables::get(m);
  const Eigen::VectorXd& p = sol.parameters.values;
  const Eigen::MatrixXd ref = detail::reference_at_gauss(sys, mesh);
  const int nic = sys.ic_count();
  Eigen::VectorXd r(n * N * m + sys.bc_count + nic);
  Eigen::VectorXd ics = Eigen::VectorXd::Zero(nic);
  Eigen::VectorXd empty;
  for (int i = 0; i < N; ++i) {
    const double h = mesh.width(i);
    const auto coeff = sol.interval_coefficients(i);
    for (int c = 0; c < m; ++c) {
      const double x = mesh.node_positions[i] + h * tab.gauss.nodes[c];
      const Eigen::VectorXd u = coeff * tab.basis.row(c).transpose();
      const Eigen::VectorXd du = coeff * tab.basis_dt.row(c).transpose() / h;
      r.segment((i * m + c) * n, n) = du - sys.rhs(x, u, p);
      for (int k = 0; k < nic; ++k) {
        const auto& ic = sys.integral_conditions[k];
        const Eigen::VectorXd rf = ic.uses_reference ? Eigen::VectorXd(ref.col(i * m + c)) : empty;
        ics[k] += h * tab.gauss.weights[c] * ic.integrand(x, u, rf, p);
      }
    }
  }
  const Eigen::VectorXd g = sys.bc(sol.left_state(), sol.right_state(), p);
  if (g.size() != sys.bc_count) throw DimensionError(sys.name + ": bc returned wrong length");
  r.segment(n * N * m, sys.bc_count) = g;
  for (int k = 0; k < nic; ++k) {
    const int sp = sys.integral_conditions[k].subtract_parameter;
    if (sp >= 0) ics[k] -= p[sp];
  }
  r.tail(nic) = ics;
  return r;
}

/// Jacobian of assemble_residual with respect to the point values and the
/// parameters listed in `active`. `extra_dense_rows` reserves zero rows at the
/// end of the dense block for caller-supplied equations.
inline BorderedAbdMatrix assemble_jacobian(const BvpSystem& sys, const CollocationSolution& sol,
                                           const std::vector<int>& active, int extra_dense_rows = 0) {
  sys.check_solution(sol);
  const Mesh& mesh = sol.mesh;
  const int n = sys.state_dim, N = mesh.interval_count, m = mesh.collocation_degree;
  const int q = static_cast<int>(active.size());
  const int nic = sys.ic_count();
  const auto& tab = CollocationTables::get(m);
  const Eigen::VectorXd& p = sol.parameters.values;
  const Eigen::MatrixXd ref = detail::reference_at_gauss(sys, mesh);
  BorderedAbdMatrix J(n, N, m, q, sys.bc_count, nic + extra_dense_rows);
  const int width = n * (m + 1);
  Eigen::VectorXd empty;
  for (int i = 0; i < N; ++i) {
    const double h = mesh.width(i);
    const auto coeff = sol.interval_coefficients(i);
    Eigen::MatrixXd& B = J.blocks[i];
    for (int c = 0; c < m; ++c) {
      const double x = mesh.node_positions[i] + h * tab.gauss.nodes[c];
      const Eigen::VectorXd u = coeff * tab.basis.row(c).transpose();
      const Eigen::MatrixXd fu = sys.rhs_jac_state(x, u, p);
      const Eigen::MatrixXd fp = q > 0 ? sys.rhs_jac_params(x, u, p) : Eigen::MatrixXd();
      for (int j = 0; j <= m; ++j) {
        auto blk = B.block(c * n, j * n, n, n);
        blk = -tab.basis(c, j) * fu;
        blk.diagonal().array() += tab.basis_dt(c, j) / h;
      }
      for (int a = 0; a < q; ++a) B.block(c * n, width + a, n, 1) = -fp.col(active[a]);
      const double w = h * tab.gauss.weights[c];
      for (int k = 0; k < nic; ++k) {
        const auto& ic = sys.integral_conditions[k];
        const Eigen::VectorXd rf = ic.uses_reference ? Eigen::VectorXd(ref.col(i * m + c)) : empty;
        const Eigen::VectorXd gu = ic.grad_state(x, u, rf, p);
        for (int j = 0; j <= m; ++j)
          J.dense.block(k, (i * m + j) * n, 1, n) += w * tab.basis(c, j) * gu.transpose();
        if (ic.grad_params && q > 0) {
          const Eigen::VectorXd gp = ic.grad_params(x, u, rf, p);
          for (int a = 0; a < q; ++a) J.dense(k, J.value_unknowns() + a) += w * gp[active[a]];
        }
      }
    }
  }
  const Eigen::MatrixXd G = sys.bc_jac(sol.left_state(), sol.right_state(), p);
  if (G.rows() != sys.bc_count || G.cols() != 2 * n + sys.parameter_count())
    throw DimensionError(sys.name + ": bc_jac has wrong shape");
  J.bc.leftCols(2 * n) = G.leftCols(2 * n);
  for (int a = 0; a < q; ++a) J.bc.col(2 * n + a) = G.col(2 * n + active[a]);
  for (int k = 0; k < nic; ++k) {
    const int sp = sys.integral_conditions[k].subtract_parameter;
    for (int a = 0; a < q; ++a)
      if (active[a] == sp) J.dense(k, J.value_unknowns() + a) -= 1.0;
  }
  return J;
}

}  // namespace cnls::bvp
