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

#include "wc4dvar/rprecond.hpp"

#include <algorithm>
#include <limits>
#include <numeric>

#include "wc4dvar/eigensolve.hpp"

namespace wc4dvar {

std::string to_string(RHatKind k) {
  switch (k) {
    case RHatKind::Diag: return "diag";
    case RHatKind::Block: return "block";
    case RHatKind::RR: return "rr";
    case RHatKind::ME: return "me";
    case RHatKind::Exact: return "exact";
  }
  return "?";
}

namespace {

// Splits [a, b) near its midpoint, preferring a block-size boundary.
std::vector<Range> split_range(const std::vector<Range>& r, std::size_t idx,
                               const std::vector<std::size_t>& pst) {
  const auto [a, b] = r[idx];
  if (b - a < 2) return r;
  const std::size_t target = a + (b - a + 1) / 2;
  std::size_t cut = target;
  std::size_t best = std::numeric_limits<std::size_t>::max();
  for (std::size_t q : pst) {
    if (q <= a || q >= b) continue;
    const std::size_t d = q > target ? q - target : target - q;
    if (d < best) {
      best = d;
      cut = q;
    }
  }
  std::vector<Range> out(r.begin(), r.begin() + static_cast<std::ptrdiff_t>(idx));
  out.emplace_back(a, cut);
  out.emplace_back(cut, b);
  out.insert(out.end(), r.begin() + static_cast<std::ptrdiff_t>(idx) + 1, r.end());
  return out;
}

std::size_t largest(const std::vector<Range>& r) {
  std::size_t idx = 0;
  for (std::size_t i = 1; i < r.size(); ++i)
    if (r[i].second - r[i].first > r[idx].second - r[idx].first) idx = i;
  return idx;
}

}  // namespace

BlockPartition block_partition(const SparseSym& ri,
                               const std::vector<std::size_t>& pvec,
                               const BlockOptions& opt) {
  const std::size_t p = ri.dim();
  require(std::accumulate(pvec.begin(), pvec.end(), std::size_t{0}) == p,
          ErrorCode::InvalidArgument, "make_block: sum(pvec) must equal p");
  const std::size_t pn = pvec.size();
  std::vector<std::size_t> pst(pn + 1, 0);
  for (std::size_t j = 0; j < pn; ++j) pst[j + 1] = pst[j] + pvec[j];

  BlockPartition bp;
  bp.normvec.assign(pn > 0 ? pn - 1 : 0, 0.0);
  const auto& ptr = ri.row_ptr();
  const auto& col = ri.col_idx();
  const auto& val = ri.values();
  for (std::size_t j = 0; j + 1 < pn; ++j) {
    double f2 = 0.0;
    for (std::size_t i = pst[j]; i < pst[j + 1]; ++i)
      for (std::size_t k = ptr[i]; k < ptr[i + 1]; ++k)
        if (col[k] >= pst[j + 1] && col[k] < pst[j + 2]) f2 += val[k] * val[k];
    bp.normvec[j] = std::sqrt(f2) / std::sqrt(static_cast<double>(pvec[j] * pvec[j + 1]));
  }
  double maxnorm = 0.0;
  for (double v : bp.normvec) maxnorm = std::max(maxnorm, v);
  bp.tol = opt.tol.value_or(0.1 * maxnorm);

  std::size_t first = 0;
  for (std::size_t j = 0; j + 1 < pn; ++j)
    if (bp.normvec[j] < bp.tol) {
      bp.ranges.emplace_back(first, pst[j + 1]);
      first = pst[j + 1];
    }
  bp.ranges.emplace_back(first, p);

  if (opt.maxsize) {
    const std::size_t idx = largest(bp.ranges);
    if (bp.ranges[idx].second - bp.ranges[idx].first > *opt.maxsize)
      bp.ranges = split_range(bp.ranges, idx, pst);
  }
  if (opt.numproc) {
    const std::size_t np = *opt.numproc;
    if (bp.ranges.size() > np && bp.ranges.size() >= 2) {
      std::size_t idx = 0;
      std::size_t best = std::numeric_limits<std::size_t>::max();
      for (std::size_t i = 0; i + 1 < bp.ranges.size(); ++i) {
        const std::size_t sz = bp.ranges[i + 1].second - bp.ranges[i].first;
        if (sz < best) {
          best = sz;
          idx = i;
        }
      }
      bp.ranges[idx].second = bp.ranges[idx + 1].second;
      bp.ranges.erase(bp.ranges.begin() + static_cast<std::ptrdiff_t>(idx) + 1);
    } else if (bp.ranges.size() + 2 < np) {
      bp.ranges = split_range(bp.ranges, largest(bp.ranges), pst);
    }
  }
  return bp;
}

RHat RHat::make_diag(const SparseSym& ri) {
  RHat r;
  r.kind_ = RHatKind::Diag;
  r.p_ = ri.dim();
  Vec d = ri.diagonal();
  Vec inv(d.size());
  for (std::size_t i = 0; i < d.size(); ++i) {
    require(d[i] > 0.0, ErrorCode::InvalidArgument,
            "make_diag: nonpositive diagonal entry");
    inv[i] = 1.0 / d[i];
  }
  r.base_ = SparseSym::diagonal_matrix(d);
  r.ranges_.clear();
  for (std::size_t i = 0; i < d.size(); ++i) r.ranges_.emplace_back(i, i + 1);
  r.inv_ = DiagInv{std::move(inv)};
  return r;
}

RHat RHat::make_block(const SparseSym& ri, const std::vector<std::size_t>& pvec,
                      const BlockOptions& opt) {
  RHat r;
  r.kind_ = RHatKind::Block;
  r.p_ = ri.dim();
  r.partition_ = block_partition(ri, pvec, opt);
  r.ranges_ = r.partition_.ranges;
  r.base_ = ri;
  Blocks b;
  for (const auto& [lo, hi] : r.ranges_)
    b.factors.push_back(ichol_zero_fill(ri.principal(lo, hi)));
  r.inv_ = std::move(b);
  return r;
}

RHat RHat::make_rr(const SparseSym& ri, double gamma) {
  require(gamma > 0.0, ErrorCode::InvalidArgument, "make_rr: gamma must be > 0");
  RHat r;
  r.kind_ = RHatKind::RR;
  r.p_ = ri.dim();
  r.gamma_ = gamma;
  r.base_ = ri.shifted(gamma);
  r.inv_ = Single{ichol_zero_fill(r.base_)};
  return r;
}

RHat RHat::make_me(const SparseSym& ri, double threshold) {
  RHat r;
  r.kind_ = RHatKind::ME;
  r.p_ = ri.dim();
  r.threshold_ = threshold;
  r.base_ = ri;
  // eigenpairs with lambda < T, found by growing a k-smallest request
  EigResult ev;
  std::size_t k = std::min<std::size_t>(2, r.p_);
  for (;;) {
    ev = sym_eig_extremes(ri, EigWhich::KSmallest, k);
    if (ev.values.back() >= threshold || k == r.p_) break;
    k = std::min(2 * k, r.p_);
  }
  std::size_t m = 0;
  while (m < ev.values.size() && ev.values[m] < threshold) ++m;
  r.trivial_ = (m == 0);
  Eigen::MatrixXd v = ev.vectors.leftCols(static_cast<Eigen::Index>(m));
  Eigen::VectorXd c(static_cast<Eigen::Index>(m));
  for (std::size_t i = 0; i < m; ++i)
    c(static_cast<Eigen::Index>(i)) = threshold - ev.values[i];
  r.inv_ = LowRank{std::make_shared<LowRankUpdateInverse>(ichol_zero_fill(ri),
                                                          std::move(v), std::move(c))};
  return r;
}

RHat RHat::make_exact(const SparseSym& ri) {
  RHat r;
  r.kind_ = RHatKind::Exact;
  r.p_ = ri.dim();
  r.base_ = ri;
  r.inv_ = Single{ichol_zero_fill(ri)};
  return r;
}

std::size_t RHat::update_rank() const {
  if (const auto* lr = std::get_if<LowRank>(&inv_)) return lr->w->rank();
  return 0;
}

void RHat::apply_inverse(const Vec& x, Vec& y) const {
  require_dim(x.size(), p_, "RHat::apply_inverse");
  if (const auto* d = std::get_if<DiagInv>(&inv_)) {
    y.resize(p_);
    for (std::size_t i = 0; i < p_; ++i) y[i] = x[i] * d->inv[i];
  } else if (const auto* b = std::get_if<Blocks>(&inv_)) {
    y.resize(p_);
    Vec xb, yb;
    for (std::size_t k = 0; k < ranges_.size(); ++k) {
      const auto [lo, hi] = ranges_[k];
      xb.assign(x.begin() + static_cast<std::ptrdiff_t>(lo),
                x.begin() + static_cast<std::ptrdiff_t>(hi));
      solve_with_factor(b->factors[k], xb, yb);
      std::copy(yb.begin(), yb.end(), y.begin() + static_cast<std::ptrdiff_t>(lo));
    }
  } else if (const auto* s = std::get_if<Single>(&inv_)) {
    solve_with_factor(s->factor, x, y);
  } else {
    std::get<LowRank>(inv_).w->solve(x, y);
  }
}

Eigen::MatrixXd RHat::dense() const {
  if (kind_ == RHatKind::Block) {
    Eigen::MatrixXd full = base_.to_dense();
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(p_, p_);
    for (const auto& [lo, hi] : ranges_) {
      const auto l = static_cast<Eigen::Index>(lo);
      const auto n = static_cast<Eigen::Index>(hi - lo);
      a.block(l, l, n, n) = full.block(l, l, n, n);
    }
    return a;
  }
  Eigen::MatrixXd a = base_.to_dense();
  if (kind_ == RHatKind::ME) {
    const auto& lr = *std::get<LowRank>(inv_).w;
    a += lr.vectors() * lr.coefficients().asDiagonal() * lr.vectors().transpose();
  }
  return a;
}

double auto_gamma(const SparseSym& ri) {
  return sym_eig_extremes(ri, EigWhich::Smallest).values[0];
}

double auto_threshold(const SparseSym& ri) {
  require(ri.dim() >= 2, ErrorCode::InvalidArgument,
          "auto_threshold: need p >= 2");
  return sym_eig_extremes(ri, EigWhich::KSmallest, 2).values[1];
}

}  // namespace wc4dvar
