#pragma once

// Bordered almost-block-diagonal systems from collocation.
//
// Unknown ordering: the values at all N*m+1 representation points (n each,
// point-major), then q parameters. Row ordering: n*m collocation rows per
// interval, then the boundary rows, then dense rows (integral conditions and
// any extra equations such as the arclength condition).

#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "cnls/errors.hpp"

namespace cnls::bvp {

struct BorderedAbdMatrix {
  int n = 0;  // state dimension
  int N = 0;  // intervals
  int m = 0;  // collocation degree
  int q = 0;  // active parameters
  // per interval: (n m) x (n (m + 1) + q), columns [points i m .. i m + m | params]
  std::vector<Eigen::MatrixXd> blocks;
  Eigen::MatrixXd bc;     // n_bc x (2 n + q): [left point | right point | params]
  Eigen::MatrixXd dense;  // d x unknowns()

  BorderedAbdMatrix() = default;
  BorderedAbdMatrix(int n_, int N_, int m_, int q_, int n_bc, int n_dense)
      : n(n_), N(N_), m(m_), q(q_),
        blocks(N_, Eigen::MatrixXd::Zero(n_ * m_, n_ * (m_ + 1) + q_)),
        bc(Eigen::MatrixXd::Zero(n_bc, 2 * n_ + q_)),
        dense(Eigen::MatrixXd::Zero(n_dense, n_ * (N_ * m_ + 1) + q_)) {}

  int value_unknowns() const { return n * (N * m + 1); }
  int unknowns() const { return value_unknowns() + q; }
  int equations() const {
    return N * n * m + static_cast<int>(bc.rows()) + static_cast<int>(dense.rows());
  }

  Eigen::VectorXd multiply(const Eigen::VectorXd& x) const {
    if (x.size() != unknowns()) throw DimensionError("BorderedAbdMatrix::multiply: size mismatch");
    Eigen::VectorXd y(equations());
    const int width = n * (m + 1);
    const auto p = x.tail(q);
    for (int i = 0; i < N; ++i) {
      const auto& B = blocks[i];
      y.segment(i * n * m, n * m) =
          B.leftCols(width) * x.segment(i * n * m, width) + B.rightCols(q) * p;
    }
    const int r0 = N * n * m;
    y.segment(r0, bc.rows()) = bc.leftCols(n) * x.head(n) +
                               bc.middleCols(n, n) * x.segment(value_unknowns() - n, n) +
                               bc.rightCols(q) * p;
    y.tail(dense.rows()) = dense * x;
    return y;
  }

  Eigen::SparseMatrix<double> to_sparse() const {
    std::vector<Eigen::Triplet<double>> t;
    const int width = n * (m + 1);
    const int pcol = value_unknowns();
    for (int i = 0; i < N; ++i) {
      const auto& B = blocks[i];
      for (int r = 0; r < B.rows(); ++r) {
        for (int c = 0; c < width; ++c)
          if (B(r, c) != 0.0) t.emplace_back(i * n * m + r, i * n * m + c, B(r, c));
        for (int c = 0; c < q; ++c)
          if (B(r, width + c) != 0.0) t.emplace_back(i * n * m + r, pcol + c, B(r, width + c));
      }
    }
    const int r0 = N * n * m;
    for (int r = 0; r < bc.rows(); ++r) {
      for (int c = 0; c < n; ++c) {
        if (bc(r, c) != 0.0) t.emplace_back(r0 + r, c, bc(r, c));
        if (bc(r, n + c) != 0.0) t.emplace_back(r0 + r, pcol - n + c, bc(r, n + c));
      }
      for (int c = 0; c < q; ++c)
        if (bc(r, 2 * n + c) != 0.0) t.emplace_back(r0 + r, pcol + c, bc(r, 2 * n + c));
    }
    const int r1 = r0 + static_cast<int>(bc.rows());
    for (int r = 0; r < dense.rows(); ++r)
      for (int c = 0; c < dense.cols(); ++c)
        if (dense(r, c) != 0.0) t.emplace_back(r1 + r, c, dense(r, c));
    Eigen::SparseMatrix<double> S(equations(), unknowns());
    S.setFromTriplets(t.begin(), t.end());
    return S;
  }
};

namespace detail {

inline Eigen::MatrixXd upper_solve(const Eigen::MatrixXd& R, const Eigen::MatrixXd& B) {
  return R.triangularView<Eigen::Upper>().solve(B);
}

inline void check_triangle(const Eigen::MatrixXd& R, const char* where) {
  const double big = R.diagonal().cwiseAbs().maxCoeff();
  const double small = R.diagonal().cwiseAbs().minCoeff();
  if (!(big > 0.0) || small <= 1e-14 * big)
    throw SingularJacobianError(std::string("ABD elimination: rank-deficient pivot block in ") + where);
}

}  // namespace detail

/// Solves A X = RHS for one or more right-hand sides by condensing the
/// interval interiors, eliminating the node chain with orthogonal
/// transformations and solving the small border system with full pivoting.
inline Eigen::MatrixXd solve(const BorderedAbdMatrix& A, const Eigen::MatrixXd& rhs) {
  const int n = A.n, N = A.N, m = A.m, q = A.q;
  const int nint = n * (m - 1);
  const int d = static_cast<int>(A.dense.rows());
  const int nbc = static_cast<int>(A.bc.rows());
  const int k = static_cast<int>(rhs.cols());
  if (rhs.rows() != A.equations()) throw DimensionError("ABD solve: rhs rows mismatch");
  if (n + nbc + d != 2 * n + q)
    throw DimensionError("ABD solve: system is not square (" + std::to_string(A.equations()) +
                         " equations, " + std::to_string(A.unknowns()) + " unknowns)");

  // Dense rows in condensed columns: node values y_0..y_N and parameters.
  Eigen::MatrixXd Dy = Eigen::MatrixXd::Zero(d, (N + 1) * n);
  Eigen::MatrixXd Dp = A.dense.rightCols(q);
  Eigen::MatrixXd Drhs = rhs.bottomRows(d);
  for (int i = 0; i <= N; ++i) Dy.middleCols(i * n, n) = A.dense.middleCols(i * m * n, n);

  // Step 1: condense every interval onto its end nodes.
  struct Interior {
    Eigen::MatrixXd R, T, t;  // R w + T [y_i; y_i+1; p] = t
  };
  std::vector<Interior> interior(N);
  std::vector<Eigen::MatrixXd> Ac(N), Bc(N), Pc(N), rc(N);
  for (int i = 0; i < N; ++i) {
    const auto& B = A.blocks[i];
    Eigen::MatrixXd rest(n * m, 2 * n + q + k);
    rest << B.leftCols(n), B.middleCols(n * m, n), B.rightCols(q), rhs.middleRows(i * n * m, n * m);
    if (m > 1) {
      Eigen::HouseholderQR<Eigen::MatrixXd> qr(B.middleCols(n, nint));
      rest.applyOnTheLeft(qr.householderQ().transpose());
      Interior& in = interior[i];
      in.R = qr.matrixQR().topLeftCorner(nint, nint).triangularView<Eigen::Upper>();
      detail::check_triangle(in.R, "interval interior");
      in.T = rest.topLeftCorner(nint, 2 * n + q);
      in.t = rest.topRightCorner(nint, k);
      // remove interior unknowns from the dense rows
      const Eigen::MatrixXd Dw = A.dense.middleCols((i * m + 1) * n, nint);
      if (d > 0) {
        const Eigen::MatrixXd G = in.R.transpose().triangularView<Eigen::Lower>().solve(Dw.transpose()).transpose();
        Dy.middleCols(i * n, n) -= G * in.T.leftCols(n);
        Dy.middleCols((i + 1) * n, n) -= G * in.T.middleCols(n, n);
        Dp -= G * in.T.rightCols(q);
        Drhs -= G * in.t;
      }
    }
    const auto bottom = rest.bottomRows(n);
    Ac[i] = bottom.leftCols(n);
    Bc[i] = bottom.middleCols(n, n);
    Pc[i] = bottom.middleCols(2 * n, q);
    rc[i] = bottom.rightCols(k);
  }

  // Step 2: eliminate y_1 .. y_{N-1}; the running relation is E y_0 + F y_j + G p = S.
  struct Chain {
    Eigen::MatrixXd R, T0, T1, Tp, Ts;  // R y_j + T0 y_0 + T1 y_j+1 + Tp p = Ts
  };
  std::vector<Chain> chain(N);
  Eigen::MatrixXd E = Ac[0], F = Bc[0], G = Pc[0], S = rc[0];
  for (int j = 1; j < N; ++j) {
    Eigen::MatrixXd stacked(2 * n, n);
    stacked << F, Ac[j];
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(stacked);
    Eigen::MatrixXd rest = Eigen::MatrixXd::Zero(2 * n, 2 * n + q + k);
    rest.topLeftCorner(n, n) = E;
    rest.block(0, 2 * n, n, q) = G;
    rest.topRightCorner(n, k) = S;
    rest.block(n, n, n, n) = Bc[j];
    rest.block(n, 2 * n, n, q) = Pc[j];
    rest.bottomRightCorner(n, k) = rc[j];
    rest.applyOnTheLeft(qr.householderQ().transpose());
    Chain& c = chain[j];
    c.R = qr.matrixQR().topLeftCorner(n, n).triangularView<Eigen::Upper>();
    detail::check_triangle(c.R, "node chain");
    c.T0 = rest.topLeftCorner(n, n);
    c.T1 = rest.block(0, n, n, n);
    c.Tp = rest.block(0, 2 * n, n, q);
    c.Ts = rest.topRightCorner(n, k);
    E = rest.bottomLeftCorner(n, n);
    F = rest.block(n, n, n, n);
    G = rest.block(n, 2 * n, n, q);
    S = rest.bottomRightCorner(n, k);
    if (d > 0) {
      const Eigen::MatrixXd H =
          c.R.transpose().triangularView<Eigen::Lower>().solve(Dy.middleCols(j * n, n).transpose()).transpose();
      Dy.middleCols(0, n) -= H * c.T0;
      Dy.middleCols((j + 1) * n, n) -= H * c.T1;
      Dp -= H * c.Tp;
      Drhs -= H * c.Ts;
    }
  }

  // Step 3: border system for [y_0, y_N, p].
  const int size = 2 * n + q;
  Eigen::MatrixXd M(size, size);
  Eigen::MatrixXd b(size, k);
  M << E, F, G, A.bc, Dy.leftCols(n), Dy.rightCols(n), Dp;
  b << S, rhs.middleRows(N * n * m, nbc), Drhs;
  Eigen::FullPivLU<Eigen::MatrixXd> lu(M);
  lu.setThreshold(1e-13);
  if (lu.rank() < size)
    throw SingularJacobianError("ABD solve: singular border system (rank " + std::to_string(lu.rank()) +
                                " of " + std::to_string(size) + ")");
  const Eigen::MatrixXd border = lu.solve(b);

  // Step 4: back substitution.
  Eigen::MatrixXd X(A.unknowns(), k);
  Eigen::MatrixXd Y((N + 1) * n, k);
  Y.topRows(n) = border.topRows(n);
  Y.bottomRows(n) = border.middleRows(n, n);
  const Eigen::MatrixXd P = border.bottomRows(q);
  for (int j = N - 1; j >= 1; --j) {
    const Chain& c = chain[j];
    Y.middleRows(j * n, n) =
        detail::upper_solve(c.R, c.Ts - c.T0 * Y.topRows(n) - c.T1 * Y.middleRows((j + 1) * n, n) - c.Tp * P);
  }
  for (int i = 0; i < N; ++i) {
    X.middleRows(i * m * n, n) = Y.middleRows(i * n, n);
    if (m > 1) {
      const Interior& in = interior[i];
      X.middleRows((i * m + 1) * n, nint) =
          detail::upper_solve(in.R, in.t - in.T.leftCols(n) * Y.middleRows(i * n, n) -
                                        in.T.middleCols(n, n) * Y.middleRows((i + 1) * n, n) -
                                        in.T.rightCols(q) * P);
    }
  }
  X.middleRows(N * m * n, n) = Y.bottomRows(n);
  X.bottomRows(q) = P;
  return X;
}

}  // namespace cnls::bvp
