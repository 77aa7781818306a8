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

#include "wc4dvar/saddle.hpp"

#include <algorithm>

namespace wc4dvar {

namespace {

inline Vec part(const Vec& x, std::size_t off, std::size_t len) {
  return Vec(x.begin() + static_cast<std::ptrdiff_t>(off),
             x.begin() + static_cast<std::ptrdiff_t>(off + len));
}

inline void put(Vec& y, std::size_t off, const Vec& v) {
  std::copy(v.begin(), v.end(), y.begin() + static_cast<std::ptrdiff_t>(off));
}

}  // namespace

std::string to_string(PrecondShape s) {
  return s == PrecondShape::BlockDiag ? "PD" : "PI";
}

SaddleOperator::SaddleOperator(CovarianceSet d, CovarianceSet r, ObsOperator h,
                               BlockBandedOperator l)
    : s_(l.s()), p_(h.p()), nt_(l.n_blocks()), d_(std::move(d)),
      r_(std::move(r)), h_(std::move(h)), l_(std::move(l)) {
  require(d_.n_blocks() == nt_ && d_.block_dim() == s_, ErrorCode::Dimension,
          "SaddleOperator: D does not match L");
  require(r_.n_blocks() == nt_ && r_.block_dim() == p_, ErrorCode::Dimension,
          "SaddleOperator: R does not match H and L");
  require(h_.s() == s_, ErrorCode::Dimension,
          "SaddleOperator: H has wrong column count");
}

void SaddleOperator::apply_H(const Vec& x, Vec& y) const {
  require_dim(x.size(), s_ * nt_, "apply_H");
  y.assign(p_ * nt_, 0.0);
  Vec yb;
  for (std::size_t t = 0; t < nt_; ++t) {
    h_.hi.multiply(part(x, t * s_, s_), yb);
    put(y, t * p_, yb);
  }
  counters_.h += nt_;
}

void SaddleOperator::apply_Ht(const Vec& x, Vec& y) const {
  require_dim(x.size(), p_ * nt_, "apply_Ht");
  y.assign(s_ * nt_, 0.0);
  Vec yb;
  for (std::size_t t = 0; t < nt_; ++t) {
    h_.hi.multiply_transpose(part(x, t * p_, p_), yb);
    put(y, t * s_, yb);
  }
  counters_.ht += nt_;
}

void SaddleOperator::apply_D(const Vec& x, Vec& y) const {
  d_.multiply(x, y, &counters_.d);
}

void SaddleOperator::apply(const Vec& x, Vec& y) const {
  require_dim(x.size(), dim(), "SaddleOperator::apply");
  const std::size_t ns = s_ * nt_, np = p_ * nt_;
  const Vec x1 = part(x, 0, ns), x2 = part(x, ns, np), x3 = part(x, ns + np, ns);
  Vec a, b;
  y.assign(dim(), 0.0);

  d_.multiply(x1, a, &counters_.d);
  l_.apply(x3, b, &counters_.m);
  ++counters_.l;
  for (std::size_t i = 0; i < ns; ++i) a[i] += b[i];
  put(y, 0, a);

  r_.multiply(x2, a, &counters_.r);
  apply_H(x3, b);
  for (std::size_t i = 0; i < np; ++i) a[i] += b[i];
  put(y, ns, a);

  l_.apply_transpose(x1, a, &counters_.mt);
  ++counters_.lt;
  apply_Ht(x2, b);
  for (std::size_t i = 0; i < ns; ++i) a[i] += b[i];
  put(y, ns + np, a);
  ++counters_.a;
}

Eigen::MatrixXd SaddleOperator::H_dense() const {
  const auto s = static_cast<Eigen::Index>(s_), p = static_cast<Eigen::Index>(p_);
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(p * static_cast<Eigen::Index>(nt_),
                                            s * static_cast<Eigen::Index>(nt_));
  const Eigen::MatrixXd hi = h_.hi.to_dense();
  for (std::size_t t = 0; t < nt_; ++t) {
    const auto tt = static_cast<Eigen::Index>(t);
    h.block(tt * p, tt * s, p, s) = hi;
  }
  return h;
}

Eigen::MatrixXd SaddleOperator::to_dense() const {
  const auto ns = static_cast<Eigen::Index>(s_ * nt_);
  const auto np = static_cast<Eigen::Index>(p_ * nt_);
  const auto n = static_cast<Eigen::Index>(dim());
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
  const Eigen::MatrixXd l = l_.to_dense();
  const Eigen::MatrixXd h = H_dense();
  a.block(0, 0, ns, ns) = d_.to_dense();
  a.block(0, ns + np, ns, ns) = l;
  a.block(ns, ns, np, np) = r_.to_dense();
  a.block(ns, ns + np, np, ns) = h;
  a.block(ns + np, 0, ns, ns) = l.transpose();
  a.block(ns + np, ns, ns, np) = h.transpose();
  return a;
}

DHat::DHat(const CovarianceSet& d, Mode mode, double delta)
    : d_(&d), mode_(mode), delta_(delta) {
  for (std::size_t k = 0; k < d.n_distinct(); ++k) {
    if (mode_ == Mode::RidgeIchol) {
      ichol_.push_back(ichol_zero_fill(d.distinct(k).shifted(delta_)));
    } else {
      llt_.emplace_back(d.distinct(k).to_dense());
      require(llt_.back().info() == Eigen::Success, ErrorCode::Numerical,
              "DHat: block of D is not positive definite");
    }
  }
}

void DHat::apply_inverse(const Vec& x, Vec& y, std::uint64_t* counter) const {
  require_dim(x.size(), d_->dim(), "DHat::apply_inverse");
  const std::size_t n = d_->block_dim();
  y.assign(x.size(), 0.0);
  Vec yb;
  for (std::size_t t = 0; t < d_->n_blocks(); ++t) {
    const Vec xb = part(x, t * n, n);
    const std::size_t k = d_->slot_of(t);
    if (mode_ == Mode::RidgeIchol) {
      solve_with_factor(ichol_[k], xb, yb);
    } else {
      Eigen::VectorXd sol =
          llt_[k].solve(Eigen::Map<const Eigen::VectorXd>(xb.data(), n));
      yb.assign(sol.data(), sol.data() + n);
    }
    put(y, t * n, yb);
  }
  if (counter) *counter += d_->n_blocks();
}

Eigen::MatrixXd DHat::dense() const {
  Eigen::MatrixXd a = d_->to_dense();
  if (mode_ == Mode::RidgeIchol) a.diagonal().array() += delta_;
  return a;
}

SaddlePreconditioner::SaddlePreconditioner(const SaddleOperator& op,
                                           PrecondShape shape,
                                           BlockBandedOperator lhat,
                                           std::shared_ptr<const RHat> rhat,
                                           std::shared_ptr<const DHat> dhat)
    : op_(&op), shape_(shape), lhat_(std::move(lhat)), rhat_(std::move(rhat)),
      dhat_(std::move(dhat)) {
  require(lhat_.dim() == op.L().dim(), ErrorCode::Dimension,
          "SaddlePreconditioner: L_hat does not match L");
  require(rhat_ && rhat_->dim() == op.p(), ErrorCode::Dimension,
          "SaddlePreconditioner: R_hat does not match R_i");
  require(shape_ != PrecondShape::BlockDiag || dhat_ != nullptr,
          ErrorCode::InvalidArgument,
          "SaddlePreconditioner: block diagonal shape requires D_hat");
}

void SaddlePreconditioner::apply_rhat_inv(const Vec& x, Vec& y) const {
  const std::size_t p = op_->p();
  y.assign(x.size(), 0.0);
  Vec yb;
  for (std::size_t t = 0; t < op_->n_times(); ++t) {
    rhat_->apply_inverse(part(x, t * p, p), yb);
    put(y, t * p, yb);
  }
  op_->counters().rhat_inv += op_->n_times();
}

void SaddlePreconditioner::apply_inverse(const Vec& x, Vec& y) const {
  require_dim(x.size(), op_->dim(), "SaddlePreconditioner::apply_inverse");
  OpCounters& c = op_->counters();
  const std::size_t ns = op_->s() * op_->n_times();
  const std::size_t np = op_->p() * op_->n_times();
  const Vec x1 = part(x, 0, ns), x2 = part(x, ns, np), x3 = part(x, ns + np, ns);
  y.assign(x.size(), 0.0);
  Vec a, b;
  if (shape_ == PrecondShape::BlockDiag) {
    dhat_->apply_inverse(x1, a, &c.dhat_inv);
    put(y, 0, a);
    apply_rhat_inv(x2, a);
    put(y, ns, a);
    lhat_.apply_inverse_transpose(x3, a, &c.mt);
    ++c.lhat_inv_t;
    op_->apply_D(a, b);
    lhat_.apply_inverse(b, a, &c.m);
    ++c.lhat_inv;
    put(y, ns + np, a);
  } else {
    Vec c1;
    lhat_.apply_inverse_transpose(x3, c1, &c.mt);
    ++c.lhat_inv_t;
    put(y, 0, c1);
    apply_rhat_inv(x2, a);
    put(y, ns, a);
    op_->apply_D(c1, b);
    for (std::size_t i = 0; i < ns; ++i) b[i] = x1[i] - b[i];
    lhat_.apply_inverse(b, a, &c.m);
    ++c.lhat_inv;
    put(y, ns + np, a);
  }
  ++c.pinv;
}

Eigen::MatrixXd SaddlePreconditioner::dense() const {
  const auto ns = static_cast<Eigen::Index>(op_->s() * op_->n_times());
  const auto np = static_cast<Eigen::Index>(op_->p() * op_->n_times());
  const auto p = static_cast<Eigen::Index>(op_->p());
  const Eigen::MatrixXd lh = lhat_.to_dense();
  const Eigen::MatrixXd rh_i = rhat_->dense();
  Eigen::MatrixXd rh = Eigen::MatrixXd::Zero(np, np);
  for (std::size_t t = 0; t < op_->n_times(); ++t) {
    const auto tt = static_cast<Eigen::Index>(t);
    rh.block(tt * p, tt * p, p, p) = rh_i;
  }
  const Eigen::MatrixXd dd = op_->D().to_dense();
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(2 * ns + np, 2 * ns + np);
  if (shape_ == PrecondShape::BlockDiag) {
    out.block(0, 0, ns, ns) = dhat_->dense();
    out.block(ns, ns, np, np) = rh;
    out.block(ns + np, ns + np, ns, ns) = lh.transpose() * dd.llt().solve(lh);
  } else {
    out.block(0, 0, ns, ns) = dd;
    out.block(0, ns + np, ns, ns) = lh;
    out.block(ns, ns, np, np) = rh;
    out.block(ns + np, 0, ns, ns) = lh.transpose();
  }
  return out;
}

}  // namespace wc4dvar
