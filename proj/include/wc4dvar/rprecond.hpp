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

#ifndef WC4DVAR_RPRECOND_HPP
#define WC4DVAR_RPRECOND_HPP

#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <variant>

#include <Eigen/Dense>

#include "wc4dvar/sparse.hpp"

namespace wc4dvar {

enum class RHatKind { Diag, Block, RR, ME, Exact };

std::string to_string(RHatKind k);

struct BlockOptions {
  std::optional<double> tol;  // default 0.1 * max super-diagonal norm
  std::optional<std::size_t> maxsize;
  std::optional<std::size_t> numproc;
};

using Range = std::pair<std::size_t, std::size_t>;  // [first, last)

/// Result of the block-selection procedure on R_i.
struct BlockPartition {
  std::vector<double> normvec;  // scaled Frobenius norms, length plen - 1
  double tol = 0.0;
  std::vector<Range> ranges;    // diagonal super-blocks of the result
};

BlockPartition block_partition(const SparseSym& ri,
                               const std::vector<std::size_t>& pvec,
                               const BlockOptions& opt);

/// Observation-error preconditioner R_hat with an inverse-apply.
class RHat {
 public:
  static RHat make_diag(const SparseSym& ri);
  static RHat make_block(const SparseSym& ri,
                         const std::vector<std::size_t>& pvec,
                         const BlockOptions& opt = {});
  static RHat make_rr(const SparseSym& ri, double gamma);
  static RHat make_me(const SparseSym& ri, double threshold);
  static RHat make_exact(const SparseSym& ri);

  RHatKind kind() const { return kind_; }
  std::size_t dim() const { return p_; }
  /// Applies the realized inverse (reciprocal, IC(0) or Woodbury).
  void apply_inverse(const Vec& x, Vec& y) const;
  /// The represented matrix R_hat (not its factorized surrogate).
  Eigen::MatrixXd dense() const;

  double gamma() const { return gamma_; }
  double threshold() const { return threshold_; }
  /// True when the minimum-eigenvalue threshold changed nothing.
  bool trivial_update() const { return trivial_; }
  std::size_t update_rank() const;
  const std::vector<Range>& ranges() const { return ranges_; }
  const BlockPartition& partition() const { return partition_; }

 private:
  struct DiagInv {
    Vec inv;
  };
  struct Blocks {
    std::vector<IncChol> factors;
  };
  struct Single {
    IncChol factor;
  };
  struct LowRank {
    std::shared_ptr<LowRankUpdateInverse> w;
  };

  RHatKind kind_ = RHatKind::Diag;
  std::size_t p_ = 0;
  SparseSym base_;  // R_i, R_i + gamma I, or diag(R_i)
  std::vector<Range> ranges_;
  BlockPartition partition_;
  double gamma_ = 0.0;
  double threshold_ = 0.0;
  bool trivial_ = false;
  std::variant<DiagInv, Blocks, Single, LowRank> inv_;
};

/// lambda_min(R_i).
double auto_gamma(const SparseSym& ri);
/// Second-smallest eigenvalue of R_i.
double auto_threshold(const SparseSym& ri);

}  // namespace wc4dvar

#endif
