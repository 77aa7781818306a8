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

#ifndef WC4DVAR_SADDLE_HPP
#define WC4DVAR_SADDLE_HPP

#include <memory>
#include <variant>

#include "wc4dvar/covariance.hpp"
#include "wc4dvar/lprecond.hpp"
#include "wc4dvar/rprecond.hpp"

namespace wc4dvar {

/// Matrix-free saddle operator
///   [ D  0  L ]
///   [ 0  R  H ]
///   [ L' H' 0 ]
/// acting on (x1, x2, x3) with x1, x3 of length s(N+1) and x2 of length p(N+1).
class SaddleOperator {
 public:
  SaddleOperator(CovarianceSet d, CovarianceSet r, ObsOperator h,
                 BlockBandedOperator l);

  std::size_t s() const { return s_; }
  std::size_t p() const { return p_; }
  std::size_t n_times() const { return nt_; }  // N + 1
  std::size_t dim() const { return (2 * s_ + p_) * nt_; }

  const CovarianceSet& D() const { return d_; }
  const CovarianceSet& R() const { return r_; }
  const ObsOperator& H() const { return h_; }
  const BlockBandedOperator& L() const { return l_; }

  void apply(const Vec& x, Vec& y) const;
  /// y = blkdiag(H_i) x with counter bookkeeping; x of length s(N+1).
  void apply_H(const Vec& x, Vec& y) const;
  void apply_Ht(const Vec& x, Vec& y) const;
  void apply_D(const Vec& x, Vec& y) const;

  Eigen::MatrixXd to_dense() const;
  Eigen::MatrixXd H_dense() const;

  OpCounters& counters() const { return counters_; }

 private:
  std::size_t s_, p_, nt_;
  CovarianceSet d_;
  CovarianceSet r_;
  ObsOperator h_;
  BlockBandedOperator l_;
  mutable OpCounters counters_;
};

enum class PrecondShape { BlockDiag, InexactConstraint };

std::string to_string(PrecondShape s);

/// Approximation of D applied blockwise: zero-fill incomplete Cholesky of
/// B + delta I and Q + delta I, or an exact dense Cholesky of D's blocks.
class DHat {
 public:
  enum class Mode { RidgeIchol, Exact };
  DHat(const CovarianceSet& d, Mode mode, double delta = 0.01);

  void apply_inverse(const Vec& x, Vec& y, std::uint64_t* counter) const;
  /// The represented matrix.
  Eigen::MatrixXd dense() const;
  Mode mode() const { return mode_; }

 private:
  const CovarianceSet* d_;
  Mode mode_;
  double delta_;
  std::vector<IncChol> ichol_;                   // per distinct block
  std::vector<Eigen::LLT<Eigen::MatrixXd>> llt_;  // per distinct block
};

/// P_D^{-1} or P_I^{-1}, built from an L_hat, an R_hat (per block) and, for
/// the block diagonal shape, a D_hat.
class SaddlePreconditioner {
 public:
  SaddlePreconditioner(const SaddleOperator& op, PrecondShape shape,
                       BlockBandedOperator lhat, std::shared_ptr<const RHat> rhat,
                       std::shared_ptr<const DHat> dhat);

  PrecondShape shape() const { return shape_; }
  const BlockBandedOperator& lhat() const { return lhat_; }
  const RHat& rhat() const { return *rhat_; }

  void apply_inverse(const Vec& x, Vec& y) const;
  /// The preconditioner matrix itself (P_D or P_I), assembled densely.
  Eigen::MatrixXd dense() const;

 private:
  void apply_rhat_inv(const Vec& x, Vec& y) const;

  const SaddleOperator* op_;
  PrecondShape shape_;
  BlockBandedOperator lhat_;
  std::shared_ptr<const RHat> rhat_;
  std::shared_ptr<const DHat> dhat_;
};

}  // namespace wc4dvar

#endif
