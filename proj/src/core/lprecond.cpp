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

#include "wc4dvar/lprecond.hpp"

#include <algorithm>

namespace wc4dvar {

std::string to_string(LFlavor f) {
  switch (f) {
    case LFlavor::Exact: return "L";
    case LFlavor::L0: return "L0";
    case LFlavor::LI: return "LI";
    case LFlavor::LM: return "LM";
  }
  return "?";
}

BlockBandedOperator::BlockBandedOperator(std::size_t s, LFlavor f, std::size_t k,
                                         std::vector<SubKind> kinds,
                                         std::vector<BlockPtr> models)
    : s_(s), flavor_(f), k_(k), kinds_(std::move(kinds)),
      models_(std::move(models)) {
  require(s_ > 0, ErrorCode::InvalidArgument,
          "BlockBandedOperator: block size must be > 0");
  models_.resize(kinds_.size());
  for (std::size_t j = 0; j < kinds_.size(); ++j) {
    if (kinds_[j] != SubKind::NegModel) continue;
    require(models_[j] != nullptr, ErrorCode::InvalidArgument,
            "BlockBandedOperator: missing model block");
    require(models_[j]->dim() == s_, ErrorCode::Dimension,
            "BlockBandedOperator: model block has wrong dimension");
  }
  std::size_t first = 0;
  for (std::size_t j = 1; j <= kinds_.size(); ++j)
    if (kinds_[j - 1] == SubKind::Zero) {
      chains_.emplace_back(first, j);
      first = j;
    }
  chains_.emplace_back(first, kinds_.size() + 1);
}

BlockBandedOperator BlockBandedOperator::exact(std::vector<BlockPtr> models) {
  const std::size_t n = models.size();
  const std::size_t s = n ? models[0]->dim() : 0;
  require(s > 0, ErrorCode::InvalidArgument,
          "BlockBandedOperator::exact: need at least one model block");
  return {s, LFlavor::Exact, n + 1, std::vector<SubKind>(n, SubKind::NegModel),
          std::move(models)};
}

BlockBandedOperator BlockBandedOperator::l0(std::size_t s, std::size_t n) {
  return {s, LFlavor::L0, 1, std::vector<SubKind>(n, SubKind::Zero), {}};
}

BlockBandedOperator BlockBandedOperator::li(std::size_t s, std::size_t n) {
  return {s, LFlavor::LI, 0, std::vector<SubKind>(n, SubKind::NegIdentity), {}};
}

BlockBandedOperator BlockBandedOperator::lm(std::vector<BlockPtr> models,
                                            std::size_t k) {
  const std::size_t n = models.size();
  require(k >= 1 && k <= n + 1, ErrorCode::InvalidArgument,
          "BlockBandedOperator::lm: k must lie in [1, N+1]");
  require(n > 0, ErrorCode::InvalidArgument,
          "BlockBandedOperator::lm: need at least one model block");
  const std::size_t s = models[0]->dim();
  std::vector<SubKind> kinds(n);
  for (std::size_t j = 1; j <= n; ++j)
    kinds[j - 1] = (j % k == 0) ? SubKind::Zero : SubKind::NegModel;
  return {s, LFlavor::LM, k, std::move(kinds), std::move(models)};
}

std::size_t BlockBandedOperator::n_model_subdiagonals() const {
  return static_cast<std::size_t>(
      std::count(kinds_.begin(), kinds_.end(), SubKind::NegModel));
}

void BlockBandedOperator::check(const Vec& x) const {
  require_dim(x.size(), dim(), "BlockBandedOperator");
}

namespace {

inline Vec slice(const Vec& x, std::size_t b, std::size_t s) {
  return Vec(x.begin() + static_cast<std::ptrdiff_t>(b * s),
             x.begin() + static_cast<std::ptrdiff_t>((b + 1) * s));
}

}  // namespace

void BlockBandedOperator::apply(const Vec& x, Vec& y,
                                std::uint64_t* m_count) const {
  check(x);
  y = x;
  Vec t;
  for (std::size_t j = 1; j <= n_sub(); ++j) {
    const SubKind kd = kinds_[j - 1];
    if (kd == SubKind::Zero) continue;
    double* out = y.data() + j * s_;
    if (kd == SubKind::NegIdentity) {
      for (std::size_t i = 0; i < s_; ++i) out[i] -= x[(j - 1) * s_ + i];
    } else {
      models_[j - 1]->apply(slice(x, j - 1, s_), t);
      for (std::size_t i = 0; i < s_; ++i) out[i] -= t[i];
      if (m_count) ++*m_count;
    }
  }
}

void BlockBandedOperator::apply_transpose(const Vec& x, Vec& y,
                                          std::uint64_t* mt_count) const {
  check(x);
  y = x;
  Vec t;
  for (std::size_t j = 1; j <= n_sub(); ++j) {
    const SubKind kd = kinds_[j - 1];
    if (kd == SubKind::Zero) continue;
    double* out = y.data() + (j - 1) * s_;
    if (kd == SubKind::NegIdentity) {
      for (std::size_t i = 0; i < s_; ++i) out[i] -= x[j * s_ + i];
    } else {
      models_[j - 1]->apply_transpose(slice(x, j, s_), t);
      for (std::size_t i = 0; i < s_; ++i) out[i] -= t[i];
      if (mt_count) ++*mt_count;
    }
  }
}

void BlockBandedOperator::inverse_range(std::size_t first, std::size_t last,
                                        const Vec& x, Vec& y,
                                        std::uint64_t* m_count) const {
  Vec prev = slice(x, first, s_), t;
  std::copy(prev.begin(), prev.end(), y.begin() + static_cast<std::ptrdiff_t>(first * s_));
  for (std::size_t b = first + 1; b < last; ++b) {
    const SubKind kd = kinds_[b - 1];  // sub-diagonal j = b couples b-1 -> b
    Vec cur = slice(x, b, s_);
    if (kd == SubKind::NegIdentity) {
      for (std::size_t i = 0; i < s_; ++i) cur[i] += prev[i];
    } else if (kd == SubKind::NegModel) {
      models_[b - 1]->apply(prev, t);
      for (std::size_t i = 0; i < s_; ++i) cur[i] += t[i];
      if (m_count) ++*m_count;
    }
    std::copy(cur.begin(), cur.end(), y.begin() + static_cast<std::ptrdiff_t>(b * s_));
    prev.swap(cur);
  }
}

void BlockBandedOperator::apply_inverse(const Vec& x, Vec& y,
                                        std::uint64_t* m_count) const {
  check(x);
  y.assign(dim(), 0.0);
  for (const auto& c : chains_) inverse_range(c.first, c.second, x, y, m_count);
}

void BlockBandedOperator::apply_inverse_chain(std::size_t chain, const Vec& x,
                                              Vec& y,
                                              std::uint64_t* m_count) const {
  check(x);
  require_dim(y.size(), dim(), "apply_inverse_chain output");
  const auto& c = chains_.at(chain);
  inverse_range(c.first, c.second, x, y, m_count);
}

void BlockBandedOperator::apply_inverse_transpose(
    const Vec& x, Vec& y, std::uint64_t* mt_count) const {
  check(x);
  y.assign(dim(), 0.0);
  Vec t;
  for (const auto& c : chains_) {
    Vec next = slice(x, c.second - 1, s_);
    std::copy(next.begin(), next.end(),
              y.begin() + static_cast<std::ptrdiff_t>((c.second - 1) * s_));
    for (std::size_t b = c.second - 1; b-- > c.first;) {
      const SubKind kd = kinds_[b];  // sub-diagonal j = b+1 couples b -> b+1
      Vec cur = slice(x, b, s_);
      if (kd == SubKind::NegIdentity) {
        for (std::size_t i = 0; i < s_; ++i) cur[i] += next[i];
      } else if (kd == SubKind::NegModel) {
        models_[b]->apply_transpose(next, t);
        for (std::size_t i = 0; i < s_; ++i) cur[i] += t[i];
        if (mt_count) ++*mt_count;
      }
      std::copy(cur.begin(), cur.end(), y.begin() + static_cast<std::ptrdiff_t>(b * s_));
      next.swap(cur);
    }
  }
}

std::vector<std::pair<std::size_t, std::size_t>>
BlockBandedOperator::chain_partition() const {
  return chains_;
}

Eigen::MatrixXd BlockBandedOperator::to_dense() const {
  const auto s = static_cast<Eigen::Index>(s_);
  Eigen::MatrixXd a = Eigen::MatrixXd::Identity(dim(), dim());
  for (std::size_t j = 1; j <= n_sub(); ++j) {
    const auto r = static_cast<Eigen::Index>(j) * s;
    const auto c = static_cast<Eigen::Index>(j - 1) * s;
    if (kinds_[j - 1] == SubKind::NegIdentity)
      a.block(r, c, s, s) = -Eigen::MatrixXd::Identity(s, s);
    else if (kinds_[j - 1] == SubKind::NegModel)
      a.block(r, c, s, s) = -models_[j - 1]->to_dense();
  }
  return a;
}

}  // namespace wc4dvar
