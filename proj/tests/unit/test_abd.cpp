#include <random>

#include <Eigen/SparseLU>
#include <gtest/gtest.h>

#include "cnls/bvp/abd_solver.hpp"

using namespace cnls::bvp;
using Eigen::MatrixXd;

namespace {

BorderedAbdMatrix random_abd(int n, int N, int m, int q, int nbc, int d, unsigned seed) {
  std::mt19937 gen(seed);
  std::normal_distribution<double> nd;
  BorderedAbdMatrix A(n, N, m, q, nbc, d);
  const double h = 1.0 / N;
  for (auto& B : A.blocks) {
    for (int i = 0; i < B.size(); ++i) B.data()[i] = 0.3 * nd(gen);
    // derivative-like leading part, as produced by collocation
    for (int r = 0; r < n * m; ++r) B(r, r + (r < n ? 0 : n)) += (r % 2 ? 1.0 : -1.0) / h;
    for (int r = 0; r < n * m; ++r) B(r, r % n) -= 1.0 / h;
  }
  for (int i = 0; i < A.bc.size(); ++i) A.bc.data()[i] = nd(gen);
  for (int i = 0; i < A.dense.size(); ++i) A.dense.data()[i] = nd(gen) * h;
  return A;
}

MatrixXd sparse_lu_solve(const BorderedAbdMatrix& A, const MatrixXd& rhs) {
  Eigen::SparseMatrix<double> S = A.to_sparse();
  S.makeCompressed();
  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
  lu.compute(S);
  EXPECT_EQ(lu.info(), Eigen::Success);
  return lu.solve(rhs);
}

}  // namespace

class AbdShapes : public ::testing::TestWithParam<std::tuple<int, int, int, int>> {};

TEST_P(AbdShapes, MatchesSparseLu) {
  const auto [n, N, m, q] = GetParam();
  const int d = q > 0 ? q : 0;  // n_bc = n so dense rows balance parameters
  const auto A = random_abd(n, N, m, q, n, d, 11u + n + N + m + q);
  std::mt19937 gen(5);
  std::normal_distribution<double> nd;
  MatrixXd rhs(A.equations(), 3);
  for (int i = 0; i < rhs.size(); ++i) rhs.data()[i] = nd(gen);
  const MatrixXd x = solve(A, rhs);
  const MatrixXd ref = sparse_lu_solve(A, rhs);
  EXPECT_LT((x - ref).cwiseAbs().maxCoeff() / ref.cwiseAbs().maxCoeff(), 1e-9);
  for (int c = 0; c < 3; ++c) EXPECT_LT((A.multiply(x.col(c)) - rhs.col(c)).cwiseAbs().maxCoeff(), 1e-8);
}

INSTANTIATE_TEST_SUITE_P(Shapes, AbdShapes,
                         ::testing::Values(std::make_tuple(2, 1, 2, 0), std::make_tuple(2, 5, 4, 1),
                                           std::make_tuple(4, 12, 4, 2), std::make_tuple(3, 7, 7, 3),
                                           std::make_tuple(8, 30, 3, 3), std::make_tuple(20, 6, 4, 3)));

TEST(Abd, NonSquareRejected) {
  auto A = random_abd(2, 4, 3, 1, 2, 0, 1u);
  MatrixXd rhs = MatrixXd::Zero(A.equations(), 1);
  EXPECT_THROW(solve(A, rhs), cnls::DimensionError);
}

TEST(Abd, SingularBorderDetected) {
  auto A = random_abd(2, 4, 3, 1, 2, 1, 2u);
  A.dense.setZero();
  MatrixXd rhs = MatrixXd::Ones(A.equations(), 1);
  EXPECT_THROW(solve(A, rhs), cnls::SingularJacobianError);
}

TEST(Abd, MultiplyMatchesSparse) {
  const auto A = random_abd(3, 5, 4, 2, 3, 2, 9u);
  Eigen::VectorXd x = Eigen::VectorXd::LinSpaced(A.unknowns(), -1.0, 2.0);
  const Eigen::VectorXd y1 = A.multiply(x);
  const Eigen::VectorXd y2 = A.to_sparse() * x;
  EXPECT_LT((y1 - y2).cwiseAbs().maxCoeff(), 1e-12);
}
