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

#ifndef WC4DVAR_COVARIANCE_HPP
#define WC4DVAR_COVARIANCE_HPP

#include <memory>

#include "wc4dvar/common.hpp"
#include "wc4dvar/sparse.hpp"

namespace wc4dvar {

struct SoarSpec {
  double lengthscale = 0.6;
  std::size_t maxval = 100;
  double sigma = 0.4;
  std::size_t s = 250;

  void validate() const;
};

/// SOAR-type correlation value at cyclic lag i (0 outside the band).
double soar_row(const SoarSpec& spec, std::ptrdiff_t i);

struct CirculantInfo {
  double lambda_min_raw = 0.0;  // before any diagonal inflation
  double inflation = 0.0;       // |lambda_min| + psi, or 0
};

/// Circulant matrix from soar_row; inflated on the diagonal by
/// |lambda_min| + psi (psi ~ U[0, 0.5]) when lambda_min < 0.
SparseSym build_circulant_spd(const SoarSpec& spec, Rng& rng,
                              CirculantInfo* info = nullptr);

/// Eigenvalues of the circulant matrix defined by soar_row, via the
/// real DFT of the defining row.
Vec circulant_eigenvalues(const SoarSpec& spec);

struct BlockRSpec {
  std::vector<std::size_t> pvec;  // block sizes, sum = p
  std::vector<double> pcorr;      // upper-triangle block pairs, row-major
  double density = 0.1;
  double floor = 0.41;
  double floor_threshold = 1.0;  // shift applied when lambda_min < this
  SoarSpec soar{0.8, 20, 1.0, 0};  // per diagonal block, s taken from pvec

  std::size_t p() const;
  void validate() const;
};

/// Block sizes for p split into chunks of nominal size `block`.
std::vector<std::size_t> default_pvec(std::size_t p, std::size_t block);
/// Off-diagonal block multipliers. The blocks are split into `groups`
/// contiguous runs (one per instrument). Inside a run the multiplier is
/// base * U(0.5,1) * decay^(distance - 1); across runs it is
/// base * cross * U(0,1) * decay^(distance - 1).
std::vector<double> default_pcorr(std::size_t plen, double base, double decay,
                                  Rng& rng, std::size_t groups = 1,
                                  double cross = 0.0);
/// Index of the pair (a, b), a < b, in the pcorr layout.
std::size_t pcorr_index(std::size_t plen, std::size_t a, std::size_t b);

struct BlockRInfo {
  double lambda_min_raw = 0.0;
  double shift = 0.0;
};

SparseSym build_block_R(const BlockRSpec& spec, Rng& rng,
                        BlockRInfo* info = nullptr);

/// Per-time observation operator H_i (p x s).
struct ObsOperator {
  CsrMatrix hi;
  std::vector<std::size_t> observed;  // sorted observed columns
  std::vector<bool> smoothed;         // per row
  std::size_t n_times = 1;

  std::size_t p() const { return hi.rows(); }
  std::size_t s() const { return hi.cols(); }
};

/// Rows alternate direct (single unit entry) and smoothed (five entries of
/// 1/5 centred on the observed column) when `smoothing` is set.
ObsOperator build_obs_operator(std::size_t s, std::size_t p, Rng& rng,
                               bool smoothing = true,
                               std::size_t n_times = 1);

/// Block-diagonal collection of (shared) SPD blocks:
/// blocks()[slot_of(t)] is block t.
class CovarianceSet {
 public:
  CovarianceSet() = default;
  /// D = blkdiag(B, Q, ..., Q) with n_q copies of Q.
  static CovarianceSet make_D(SparseSym b, SparseSym q, std::size_t n_q);
  /// R = I_{n_blocks} kron R_i.
  static CovarianceSet make_R(SparseSym ri, std::size_t n_blocks);

  std::size_t n_blocks() const { return slot_.size(); }
  std::size_t block_dim() const { return distinct_.empty() ? 0 : distinct_[0]->dim(); }
  std::size_t dim() const { return n_blocks() * block_dim(); }
  std::size_t n_distinct() const { return distinct_.size(); }
  const SparseSym& block(std::size_t t) const { return *distinct_[slot_[t]]; }
  std::size_t slot_of(std::size_t t) const { return slot_[t]; }
  const SparseSym& distinct(std::size_t k) const { return *distinct_[k]; }

  /// y = blockdiag x; adds n_blocks() to *counter when given.
  void multiply(const Vec& x, Vec& y, std::uint64_t* counter = nullptr) const;
  Eigen::MatrixXd to_dense() const;

 private:
  std::vector<std::shared_ptr<const SparseSym>> distinct_;
  std::vector<std::size_t> slot_;
};

}  // namespace wc4dvar

#endif
