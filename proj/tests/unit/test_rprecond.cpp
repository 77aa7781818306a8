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

#include <algorithm>
#include <limits>

#include "../support/fixtures.hpp"
#include "wc4dvar/covariance.hpp"
#include "wc4dvar/harness.hpp"
#include "wc4dvar/rprecond.hpp"

using namespace wc4dvar;
using namespace wc4dvar::testing;

namespace {

SparseSym block_r(std::size_t p, std::uint64_t seed) {
  Rng rng(seed);
  BlockRSpec sp;
  sp.pvec = default_pvec(p, 10);
  sp.pcorr = default_pcorr(sp.pvec.size(), 0.5, 0.5, rng);
  return build_block_R(sp, rng);
}

// Sorted eigenvalues of Rhat^{-1} R through the symmetric pencil.
Eigen::VectorXd pencil(const Eigen::MatrixXd& r, const Eigen::MatrixXd& rhat) {
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(r, rhat, Eigen::EigenvaluesOnly);
  return es.eigenvalues();
}

// pvec {2,2,2,2}, one coupling entry per super-diagonal block chosen so the
// scaled norms are exactly `norms`.
SparseSym coupled(const Vec& norms) {
  std::vector<Triplet> t;
  for (std::size_t i = 0; i < 8; ++i) t.push_back({i, i, 5.0});
  for (std::size_t j = 0; j < norms.size(); ++j) t.push_back({2 * j + 1, 2 * j + 2, 2.0 * norms[j]});
  // a far coupling between blocks 1 and 3
  t.push_back({0, 5, 0.3});
  return SparseSym::from_upper(8, t);
}

}  // namespace

TEST(RDiag, DiagonalInputIsReproduced) {
  auto d = SparseSym::diagonal_matrix({2.0, 4.0, 8.0});
  auto r = RHat::make_diag(d);
  EXPECT_EQ(r.dense(), d.to_dense());
  Vec y;
  r.apply_inverse({1.0, 1.0, 1.0}, y);
  EXPECT_EQ(y, (Vec{0.5, 0.25, 0.125}));
}

TEST(RDiag, SpreadWidensWithP) {
  // a single draw is noisy at small p; the mean over a few seeds is not
  double prev = 0.0;
  for (std::size_t p : {20, 125, 500, 1000}) {
    double mean = 0.0;
    for (std::uint64_t seed : {3, 4, 5}) {
      auto ri = block_r(p, seed);
      auto ev = pencil(ri.to_dense(), RHat::make_diag(ri).dense());
      mean += ev.maxCoeff() / ev.minCoeff() / 3.0;
    }
    EXPECT_GT(mean, prev) << "p=" << p;
    prev = mean;
  }
}

TEST(BlockPartition, HandTracedCut) {
  auto ri = coupled({0.5, 0.05, 0.7});
  BlockOptions o;
  o.tol = 0.1;
  auto bp = block_partition(ri, {2, 2, 2, 2}, o);
  ASSERT_EQ(bp.normvec.size(), 3u);
  EXPECT_NEAR(bp.normvec[0], 0.5, 1e-15);
  EXPECT_NEAR(bp.normvec[1], 0.05, 1e-15);
  EXPECT_NEAR(bp.normvec[2], 0.7, 1e-15);
  EXPECT_EQ(bp.ranges, (std::vector<Range>{{0, 4}, {4, 8}}));
  Eigen::MatrixXd rh = RHat::make_block(ri, {2, 2, 2, 2}, o).dense();
  Eigen::MatrixXd full = ri.to_dense();
  EXPECT_EQ(rh(1, 2), full(1, 2));        // (1,2) coupling kept
  EXPECT_EQ(rh(5, 6), full(5, 6));        // (3,4) coupling kept
  EXPECT_EQ(rh.block(0, 4, 4, 4).norm(), 0.0);  // cross region zeroed
  EXPECT_EQ(rh(0, 5), 0.0);
}

TEST(BlockPartition, ZeroAndInfiniteTolerance) {
  auto ri = coupled({0.5, 0.05, 0.7});
  BlockOptions none, all;
  none.tol = 0.0;
  all.tol = std::numeric_limits<double>::infinity();
  EXPECT_EQ(block_partition(ri, {2, 2, 2, 2}, none).ranges, (std::vector<Range>{{0, 8}}));
  EXPECT_EQ(RHat::make_block(ri, {2, 2, 2, 2}, none).dense(), ri.to_dense());
  EXPECT_EQ(block_partition(ri, {2, 2, 2, 2}, all).ranges,
            (std::vector<Range>{{0, 2}, {2, 4}, {4, 6}, {6, 8}}));
}

TEST(BlockPartition, DefaultToleranceIsTenthOfMax) {
  auto bp = block_partition(coupled({0.5, 0.05, 0.7}), {2, 2, 2, 2}, {});
  EXPECT_NEAR(bp.tol, 0.07, 1e-15);
  EXPECT_EQ(bp.ranges.size(), 2u);
}

TEST(BlockPartition, MaxsizeAndNumproc) {
  auto ri = coupled({0.5, 0.5, 0.5});
  BlockOptions o;
  o.tol = 0.1;
  o.maxsize = 5;
  EXPECT_EQ(block_partition(ri, {2, 2, 2, 2}, o).ranges, (std::vector<Range>{{0, 4}, {4, 8}}));
  BlockOptions m;
  m.tol = std::numeric_limits<double>::infinity();
  m.numproc = 3;  // four blocks, merge the smallest adjacent pair (earliest)
  EXPECT_EQ(block_partition(ri, {2, 2, 2, 2}, m).ranges,
            (std::vector<Range>{{0, 4}, {4, 6}, {6, 8}}));
  BlockOptions g;
  g.tol = 0.1;
  g.numproc = 4;  // one block, fewer than numproc - 2: split once
  EXPECT_EQ(block_partition(ri, {2, 2, 2, 2}, g).ranges, (std::vector<Range>{{0, 4}, {4, 8}}));
}

TEST(BlockR, InverseExactForTridiagonalBlocks) {
  Rng rng(4);
  auto ri = random_tridiag_spd(12, rng);
  BlockOptions o;
  o.tol = std::numeric_limits<double>::infinity();
  auto r = RHat::make_block(ri, {4, 4, 4}, o);
  Vec x = rng.normal_vector(12), y;
  r.apply_inverse(x, y);
  EXPECT_LT(max_abs_diff(y, r.dense().llt().solve(ev(x))), 1e-12);
}

// Default R at p=125: the partition cuts between instruments and the block
// preconditioned spectrum is much tighter than the diagonal one.
TEST(BlockR, DefaultsGiveNontrivialClusteredPartition) {
  const Config cfg;
  Rng rng(1);
  BlockRSpec sp;
  sp.pvec = default_pvec(125, cfg.size("r_block_size"));
  sp.pcorr = default_pcorr(sp.pvec.size(), cfg.real("r_pcorr"), cfg.real("r_pcorr_decay"), rng,
                           cfg.size("r_instruments"), cfg.real("r_pcorr_cross"));
  sp.density = cfg.real("r_density");
  const Eigen::MatrixXd r = build_block_R(sp, rng).to_dense();
  const auto ri = SparseSym::from_dense(r);
  const auto blk = RHat::make_block(ri, sp.pvec);
  EXPECT_GT(blk.ranges().size(), 1u);
  EXPECT_LT(blk.ranges().size(), sp.pvec.size());
  const auto lb = pencil(r, blk.dense());
  const auto ld = pencil(r, RHat::make_diag(ri).dense());
  EXPECT_LT(lb(lb.size() - 1) / lb(0), 0.2 * ld(ld.size() - 1) / ld(0));
  EXPECT_GT(lb(0), 0.5);
  EXPECT_LT(lb(lb.size() - 1), 1.5);
}

TEST(RidgeRegression, SmallGammaApproachesR) {
  auto ri = block_r(40, 5);
  EXPECT_LT((RHat::make_rr(ri, 1e-12).dense() - ri.to_dense()).cwiseAbs().maxCoeff(), 1e-11);
}

TEST(RidgeRegression, SpectrumMap) {
  auto ri = block_r(125, 6);
  for (double gamma : {auto_gamma(ri), 1.0}) {
    auto r = RHat::make_rr(ri, gamma);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(ri.to_dense(), Eigen::EigenvaluesOnly);
    Eigen::VectorXd want = es.eigenvalues().array() / (es.eigenvalues().array() + gamma);
    std::sort(want.data(), want.data() + want.size());
    Eigen::VectorXd got = pencil(ri.to_dense(), r.dense());
    EXPECT_LT((got - want).cwiseAbs().maxCoeff(), 1e-10);
    EXPECT_GT(got.minCoeff(), 0.0);
    EXPECT_LT(got.maxCoeff(), 1.0);
  }
}

TEST(MinimumEigenvalue, ThresholdBelowSpectrumIsNoOp) {
  auto ri = block_r(60, 7);
  auto r = RHat::make_me(ri, 0.5 * auto_gamma(ri));
  EXPECT_TRUE(r.trivial_update());
  EXPECT_EQ(r.update_rank(), 0u);
  EXPECT_EQ(r.dense(), ri.to_dense());
}

TEST(MinimumEigenvalue, SpectrumMap) {
  auto ri = block_r(125, 8);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(ri.to_dense(), Eigen::EigenvaluesOnly);
  const Eigen::VectorXd lam = es.eigenvalues();
  for (double t : {lam(1), lam(5), 0.5 * (lam(10) + lam(11))}) {
    auto r = RHat::make_me(ri, t);
    Eigen::VectorXd want = lam.unaryExpr([t](double l) { return std::min(1.0, l / t); });
    std::sort(want.data(), want.data() + want.size());
    EXPECT_LT((pencil(ri.to_dense(), r.dense()) - want).cwiseAbs().maxCoeff(), 1e-10);
  }
}

TEST(MinimumEigenvalue, AutoThresholdChangesOneEigenvalue) {
  auto ri = block_r(125, 9);
  auto r = RHat::make_me(ri, auto_threshold(ri));
  EXPECT_EQ(r.update_rank(), 1u);
  Eigen::VectorXd got = pencil(ri.to_dense(), r.dense());
  EXPECT_EQ((got.array() < 1.0 - 1e-10).count(), 1);
}

TEST(MinimumEigenvalue, WoodburyInverseForTridiagonal) {
  Rng rng(10);
  auto ri = random_tridiag_spd(30, rng);
  auto r = RHat::make_me(ri, auto_threshold(ri) + 0.1);
  ASSERT_GE(r.update_rank(), 1u);
  Vec x = rng.normal_vector(30), y;
  r.apply_inverse(x, y);
  EXPECT_LT(max_abs_diff(y, r.dense().llt().solve(ev(x))), 1e-10);
}

TEST(ExactR, RepresentsR) {
  auto ri = block_r(50, 11);
  EXPECT_EQ(RHat::make_exact(ri).dense(), ri.to_dense());
}
