/*
 *   Copyright 2026 The wc4dvar Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include <gtest/gtest.h>

#include "../support/fixtures.hpp"
#include "wc4dvar/eigensolve.hpp"
#include "wc4dvar/covariance.hpp"

using namespace wc4dvar;
using namespace wc4dvar::testing;

namespace {

// Textbook dense IC(0): right-looking Cholesky that discards every update
// outside the lower pattern of A.
Eigen::MatrixXd dense_ic0(const Eigen::MatrixXd& a) {
  const Eigen::Index n = a.rows();
  Eigen::MatrixXd g = a.triangularView<Eigen::Lower>();
  for (Eigen::Index k = 0; k < n; ++k) {
    g(k, k) = std::sqrt(g(k, k));
    for (Eigen::Index i = k + 1; i < n; ++i)
      if (a(i, k) != 0.0) g(i, k) /= g(k, k);
    for (Eigen::Index j = k + 1; j < n; ++j)
      for (Eigen::Index i = j; i < n; ++i)
        if (a(i, j) != 0.0) g(i, j) -= g(i, k) * g(j, k);
  }
  return g;
}

}  // namespace

TEST(SparseSym, FromUpperMirrorsAndSums) {
  auto a = SparseSym::from_upper(3, {{0, 1, 2.0}, {0, 1, 1.0}, {2, 2, 5.0}});
  EXPECT_DOUBLE_EQ(a.at(0, 1), 3.0);
  EXPECT_DOUBLE_EQ(a.at(1, 0), 3.0);
  EXPECT_DOUBLE_EQ(a.at(2, 2), 5.0);
  EXPECT_DOUBLE_EQ(a.at(0, 0), 0.0);  // structurally present
  EXPECT_EQ(a.nnz(), 5u);
}

TEST(SparseSym, MultiplyMatchesDense) {
  Rng rng(7);
  auto a = random_dense_spd(12, rng);
  Vec x = rng.normal_vector(12);
  EXPECT_LT(max_abs_diff(a.multiply(x), a.to_dense() * ev(x)), 1e-13);
}

TEST(SparseSym, PrincipalAndShift) {
  Rng rng(3);
  auto a = random_dense_spd(8, rng);
  Eigen::MatrixXd d = a.to_dense();
  EXPECT_LT((a.principal(2, 6).to_dense() - d.block(2, 2, 4, 4)).norm(), 1e-15);
  Eigen::MatrixXd sh = d;
  sh.diagonal().array() += 0.25;
  EXPECT_LT((a.shifted(0.25).to_dense() - sh).norm(), 1e-15);
}

TEST(CsrMatrix, TransposeIsAdjoint) {
  Rng rng(5);
  std::vector<Triplet> t;
  for (int k = 0; k < 20; ++k) t.push_back({rng.index(6), rng.index(9), rng.normal()});
  CsrMatrix m(6, 9, t);
  Vec x = rng.normal_vector(9), y = rng.normal_vector(6), mx, mty;
  m.multiply(x, mx);
  m.multiply_transpose(y, mty);
  EXPECT_NEAR(dot(mx, y), dot(x, mty), 1e-12);
  EXPECT_LT(max_abs_diff(mx, m.to_dense() * ev(x)), 1e-13);
}

TEST(Ichol, DiagonalGivesSquareRoots) {
  auto f = ichol_zero_fill(SparseSym::diagonal_matrix({4.0, 9.0}));
  Eigen::MatrixXd g = f.lower_dense();
  EXPECT_DOUBLE_EQ(g(0, 0), 2.0);
  EXPECT_DOUBLE_EQ(g(1, 1), 3.0);
  EXPECT_DOUBLE_EQ(g(1, 0), 0.0);
  EXPECT_EQ(f.shift, 0.0);
}

TEST(Ichol, TridiagonalIsExactCholesky) {
  auto a = SparseSym::from_upper(2, {{0, 0, 2.0}, {0, 1, -1.0}, {1, 1, 2.0}});
  Eigen::MatrixXd g = ichol_zero_fill(a).lower_dense();
  EXPECT_LT((g * g.transpose() - a.to_dense()).cwiseAbs().maxCoeff(), 1e-14);
  Rng rng(11);
  auto t = random_tridiag_spd(30, rng);
  Eigen::MatrixXd gt = ichol_zero_fill(t).lower_dense();
  Eigen::MatrixXd chol = t.to_dense().llt().matrixL();
  EXPECT_LT((gt - chol).cwiseAbs().maxCoeff(), 1e-13);
}

TEST(Ichol, MatchesDenseZeroFillOracle) {
  Rng rng(21);
  // sparse SPD with fill-producing pattern
  const std::size_t n = 25;
  std::vector<Triplet> t;
  for (std::size_t i = 0; i < n; ++i) {
    t.push_back({i, i, 6.0});
    for (std::size_t d : {1, 4, 7})
      if (i + d < n && rng.uniform() < 0.7) t.push_back({i, i + d, rng.uniform(-1, 1)});
  }
  auto a = SparseSym::from_upper(n, t);
  auto f = ichol_zero_fill(a);
  ASSERT_EQ(f.shift, 0.0);
  EXPECT_LT((f.lower_dense() - dense_ic0(a.to_dense())).cwiseAbs().maxCoeff(), 1e-13);
}

TEST(Ichol, SoarBackgroundNeedsNoShift) {
  Rng rng(1);
  auto b = build_circulant_spd({0.6, 100, 0.4, 250}, rng);
  auto f = ichol_zero_fill(b);
  EXPECT_EQ(f.shift, 0.0);
}

TEST(Ichol, BreakdownRetriesWithShift) {
  // indefinite-ish pattern: IC(0) of this matrix hits a negative pivot
  auto a = SparseSym::from_upper(3, {{0, 0, 1.0}, {0, 1, 2.0}, {1, 1, 1.0}, {2, 2, 1.0}});
  auto f = ichol_zero_fill(a);
  EXPECT_GT(f.shift, 0.0);
  Eigen::MatrixXd g = f.lower_dense();
  Eigen::MatrixXd want = a.to_dense();
  want.diagonal().array() += f.shift;
  EXPECT_LT((g * g.transpose() - want).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(SolveWithFactor, IdentityAndDiagonal) {
  Vec b{1.5, -2.0, 3.0};
  EXPECT_EQ(solve_with_factor(ichol_zero_fill(SparseSym::identity(3)), b), b);
  Vec x = solve_with_factor(ichol_zero_fill(SparseSym::diagonal_matrix({4.0, 9.0})), {4.0, 9.0});
  EXPECT_DOUBLE_EQ(x[0], 1.0);
  EXPECT_DOUBLE_EQ(x[1], 1.0);
}

TEST(SolveWithFactor, TridiagonalMatchesDenseSolve) {
  Rng rng(4);
  auto a = random_tridiag_spd(40, rng);
  Vec b = rng.normal_vector(40);
  Eigen::VectorXd want = a.to_dense().llt().solve(ev(b));
  EXPECT_LT(max_abs_diff(solve_with_factor(ichol_zero_fill(a), b), want), 1e-12);
}

TEST(Woodbury, RankZeroIsPlainSolve) {
  Rng rng(8);
  auto f = ichol_zero_fill(random_tridiag_spd(10, rng));
  LowRankUpdateInverse w(f, Eigen::MatrixXd(10, 0), Eigen::VectorXd(0));
  Vec b = rng.normal_vector(10);
  EXPECT_EQ(woodbury_solve(w, b), solve_with_factor(f, b));
}

TEST(Woodbury, UnitRankOneClosedForm) {
  Eigen::MatrixXd v = Eigen::MatrixXd::Zero(3, 1);
  v(0, 0) = 1.0;
  LowRankUpdateInverse w(ichol_zero_fill(SparseSym::identity(3)), v,
                         Eigen::VectorXd::Ones(1));
  Vec x = woodbury_solve(w, {3.0, 1.0, -2.0});
  EXPECT_NEAR(x[0], 1.5, 1e-15);
  EXPECT_NEAR(x[1], 1.0, 1e-15);
  EXPECT_NEAR(x[2], -2.0, 1e-15);
}

TEST(Woodbury, RankTwoMatchesDenseInverse) {
  Rng rng(9);
  auto a = random_dense_spd(10, rng, 1.0);
  auto f = ichol_zero_fill(a);  // full pattern: exact Cholesky
  Eigen::MatrixXd v(10, 2);
  for (int i = 0; i < 10; ++i)
    for (int j = 0; j < 2; ++j) v(i, j) = rng.normal();
  Eigen::VectorXd c(2);
  c << 0.7, 1.3;
  LowRankUpdateInverse w(f, v, c);
  Eigen::MatrixXd full = a.to_dense() + v * c.asDiagonal() * v.transpose();
  Vec b = rng.normal_vector(10);
  EXPECT_LT(max_abs_diff(woodbury_solve(w, b), full.lu().solve(ev(b))), 1e-10);
}

TEST(Woodbury, SingularCapacitanceIsReported) {
  Eigen::MatrixXd v = Eigen::MatrixXd::Zero(2, 1);
  v(0, 0) = 1.0;
  Eigen::VectorXd c(1);
  c << -1.0;  // I - e1 e1^T is singular
  try {
    LowRankUpdateInverse w(ichol_zero_fill(SparseSym::identity(2)), v, c);
    FAIL() << "expected a numerical error";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::Numerical);
  }
}

TEST(Eigensolve, IdentityLargestAndDiagSmallest) {
  EXPECT_NEAR(sym_eig_extremes(SparseSym::identity(5), EigWhich::Largest).values[0], 1.0, 1e-14);
  Vec d(10);
  for (int i = 0; i < 10; ++i) d[i] = i + 1;
  auto r = sym_eig_extremes(SparseSym::diagonal_matrix(d), EigWhich::KSmallest, 2);
  ASSERT_EQ(r.values.size(), 2u);
  EXPECT_NEAR(r.values[0], 1.0, 1e-14);
  EXPECT_NEAR(r.values[1], 2.0, 1e-14);
}

TEST(Eigensolve, LanczosSoarSmallestMatchesDense) {
  Rng rng(1);
  auto b = build_circulant_spd({0.6, 100, 0.4, 250}, rng);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(b.to_dense(), Eigen::EigenvaluesOnly);
  EigOptions opt;
  opt.dense_threshold = 0;  // force Lanczos
  auto lo = sym_eig_extremes(b, EigWhich::Smallest, 1, opt);
  auto hi = sym_eig_extremes(b, EigWhich::Largest, 1, opt);
  EXPECT_FALSE(lo.dense);
  EXPECT_NEAR(lo.values[0], es.eigenvalues()(0), 1e-8);
  EXPECT_NEAR(hi.values[0], es.eigenvalues().maxCoeff(), 1e-8);
}

TEST(Eigensolve, LanczosKSmallestMatchesDense) {
  Rng rng(2);
  auto a = random_dense_spd(120, rng);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a.to_dense(), Eigen::EigenvaluesOnly);
  EigOptions opt;
  opt.dense_threshold = 0;
  auto r = sym_eig_extremes(a, EigWhich::KSmallest, 3, opt);
  for (int i = 0; i < 3; ++i) EXPECT_NEAR(r.values[i], es.eigenvalues()(i), 1e-8);
}
