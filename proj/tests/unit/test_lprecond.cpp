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
#include "wc4dvar/lprecond.hpp"

using namespace wc4dvar;
using namespace wc4dvar::testing;

namespace {

std::vector<BlockPtr> random_models(std::size_t s, std::size_t n, Rng& rng) {
  std::vector<BlockPtr> m;
  for (std::size_t j = 0; j < n; ++j) m.push_back(random_model(s, rng));
  return m;
}

Eigen::MatrixXd mat(const BlockPtr& b) {
  return static_cast<const MatrixBlock&>(*b).matrix();
}

// Dense unit lower block-bidiagonal matrix; keep(j) decides if M_j stays.
template <class Keep>
Eigen::MatrixXd assemble(const std::vector<BlockPtr>& m, std::size_t s, Keep keep) {
  const std::size_t n1 = m.size() + 1;
  Eigen::MatrixXd a = Eigen::MatrixXd::Identity(s * n1, s * n1);
  for (std::size_t j = 1; j <= m.size(); ++j)
    if (keep(j)) a.block(j * s, (j - 1) * s, s, s) = -mat(m[j - 1]);
  return a;
}

std::vector<std::size_t> chain_lengths(const BlockBandedOperator& op) {
  std::vector<std::size_t> out;
  for (auto [a, b] : op.chain_partition()) out.push_back(b - a);
  return out;
}

}  // namespace

TEST(LHat, L0IsIdentity) {
  auto l = BlockBandedOperator::l0(4, 3);
  Rng rng(1);
  Vec x = rng.normal_vector(16), y, z;
  l.apply(x, y);
  l.apply_inverse(x, z);
  EXPECT_EQ(y, x);
  EXPECT_EQ(z, x);
  EXPECT_EQ(l.to_dense(), Eigen::MatrixXd::Identity(16, 16));
}

TEST(LHat, LIHasNegativeIdentitySubdiagonal) {
  auto l = BlockBandedOperator::li(2, 2);
  Eigen::MatrixXd want = Eigen::MatrixXd::Identity(6, 6);
  for (int i = 0; i < 4; ++i) want(i + 2, i) = -1.0;
  EXPECT_EQ(l.to_dense(), want);
}

TEST(LHat, DenseAssemblyOracle) {
  Rng rng(2);
  auto m = random_models(5, 3, rng);
  auto l = BlockBandedOperator::exact(m);
  Eigen::MatrixXd want = assemble(m, 5, [](std::size_t) { return true; });
  EXPECT_LT((l.to_dense() - want).cwiseAbs().maxCoeff(), 1e-13);
  Vec x = rng.normal_vector(20), y, yt;
  std::uint64_t mc = 0, mtc = 0;
  l.apply(x, y, &mc);
  l.apply_transpose(x, yt, &mtc);
  EXPECT_LT(max_abs_diff(y, want * ev(x)), 1e-13);
  EXPECT_LT(max_abs_diff(yt, want.transpose() * ev(x)), 1e-13);
  EXPECT_EQ(mc, 3u);
  EXPECT_EQ(mtc, 3u);
}

TEST(LHat, LMZeroesEveryKthSubdiagonal) {
  Rng rng(3);
  auto m = random_models(3, 6, rng);
  for (std::size_t k = 1; k <= 7; ++k) {
    auto lm = BlockBandedOperator::lm(m, k);
    Eigen::MatrixXd want = assemble(m, 3, [k](std::size_t j) { return j % k != 0; });
    EXPECT_LT((lm.to_dense() - want).cwiseAbs().maxCoeff(), 1e-15) << "k=" << k;
  }
}

TEST(LHat, FullKIsExactOperator) {
  Rng rng(4);
  auto m = random_models(4, 5, rng);
  auto lm = BlockBandedOperator::lm(m, 6);
  auto l = BlockBandedOperator::exact(m);
  Vec x = rng.normal_vector(24), a, b;
  lm.apply(x, a);
  l.apply(x, b);
  EXPECT_EQ(a, b);
  EXPECT_EQ(lm.n_model_subdiagonals(), 5u);
}

TEST(LHat, UnitKIsIdentity) {
  Rng rng(5);
  auto m = random_models(3, 4, rng);
  EXPECT_EQ(BlockBandedOperator::lm(m, 1).to_dense(), Eigen::MatrixXd::Identity(15, 15));
}

TEST(LHat, InverseRoundTripForEveryK) {
  Rng rng(6);
  auto m = random_models(5, 6, rng);
  for (std::size_t k = 1; k <= 7; ++k) {
    auto lm = BlockBandedOperator::lm(m, k);
    Vec x = rng.normal_vector(35), a, b, c, d;
    lm.apply(x, a);
    lm.apply_inverse(a, b);
    lm.apply_transpose(x, c);
    lm.apply_inverse_transpose(c, d);
    for (std::size_t i = 0; i < 35; ++i) {
      EXPECT_NEAR(b[i], x[i], 1e-12) << "k=" << k;
      EXPECT_NEAR(d[i], x[i], 1e-12) << "k=" << k;
    }
  }
}

TEST(LHat, InverseBlocksFollowChainProducts) {
  const std::size_t s = 3, n = 5, k = 3;
  Rng rng(7);
  auto m = random_models(s, n, rng);
  auto lm = BlockBandedOperator::lm(m, k);
  Eigen::MatrixXd inv = lm.to_dense().inverse();
  // 1-based blocks i >= j: product M_{i-1} ... M_j when no dropped
  // sub-diagonal lies between, else zero
  for (std::size_t i = 1; i <= n + 1; ++i)
    for (std::size_t j = 1; j <= i; ++j) {
      Eigen::MatrixXd want = Eigen::MatrixXd::Identity(s, s);
      for (std::size_t t = j; t < i; ++t) {
        if (t % k == 0) {
          want.setZero();
          break;
        }
        want = mat(m[t - 1]) * want;
      }
      EXPECT_LT((inv.block((i - 1) * s, (j - 1) * s, s, s) - want).cwiseAbs().maxCoeff(), 1e-12)
          << "block (" << i << "," << j << ")";
    }
}

TEST(LHat, ChainPartition) {
  Rng rng(8);
  EXPECT_EQ(chain_lengths(BlockBandedOperator::lm(random_models(2, 15, rng), 4)),
            (std::vector<std::size_t>{4, 4, 4, 4}));
  EXPECT_EQ(chain_lengths(BlockBandedOperator::lm(random_models(2, 6, rng), 1)),
            (std::vector<std::size_t>(7, 1)));
  EXPECT_EQ(chain_lengths(BlockBandedOperator::lm(random_models(2, 6, rng), 3)),
            (std::vector<std::size_t>{3, 3, 1}));
}

TEST(LHat, ChainsSolveIndependently) {
  Rng rng(9);
  auto lm = BlockBandedOperator::lm(random_models(4, 8, rng), 3);
  Vec x = rng.normal_vector(36), whole, pieces(36, 0.0);
  lm.apply_inverse(x, whole);
  const auto chains = lm.chain_partition();
  for (std::size_t c = chains.size(); c-- > 0;) lm.apply_inverse_chain(c, x, pieces);
  EXPECT_EQ(pieces, whole);
}

TEST(LHat, RejectsBadInput) {
  Rng rng(10);
  auto m = random_models(3, 4, rng);
  EXPECT_THROW(BlockBandedOperator::lm(m, 0), Error);
  EXPECT_THROW(BlockBandedOperator::lm(m, 6), Error);
  Vec bad(7), y;
  EXPECT_THROW(BlockBandedOperator::exact(m).apply(bad, y), Error);
}
