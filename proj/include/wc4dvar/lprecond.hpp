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

#ifndef WC4DVAR_LPRECOND_HPP
#define WC4DVAR_LPRECOND_HPP

#include <string>
#include <utility>

#include "wc4dvar/models.hpp"

namespace wc4dvar {

enum class LFlavor { Exact, L0, LI, LM };
enum class SubKind { Zero, NegIdentity, NegModel };

std::string to_string(LFlavor f);

/// Unit lower block-bidiagonal operator on N+1 blocks of size s.
/// Sub-diagonal j (j = 1..N) couples block j+1 to block j (1-based) and is
/// one of 0, -I, -M_j.
class BlockBandedOperator {
 public:
  /// models[j-1] is M_j, j = 1..N.
  static BlockBandedOperator exact(std::vector<BlockPtr> models);
  static BlockBandedOperator l0(std::size_t s, std::size_t n);
  static BlockBandedOperator li(std::size_t s, std::size_t n);
  /// Drops M_j whenever j mod k == 0. lm(models, N+1) is the exact operator.
  static BlockBandedOperator lm(std::vector<BlockPtr> models, std::size_t k);

  LFlavor flavor() const { return flavor_; }
  std::size_t k() const { return k_; }
  std::size_t s() const { return s_; }
  std::size_t n_sub() const { return kinds_.size(); }  // N
  std::size_t n_blocks() const { return kinds_.size() + 1; }
  std::size_t dim() const { return s_ * n_blocks(); }
  /// Kind of sub-diagonal j, 1-based.
  SubKind kind(std::size_t j) const { return kinds_.at(j - 1); }
  std::size_t n_model_subdiagonals() const;

  // `m_count` / `mt_count` receive the number of model block applications.
  void apply(const Vec& x, Vec& y, std::uint64_t* m_count = nullptr) const;
  void apply_transpose(const Vec& x, Vec& y,
                       std::uint64_t* mt_count = nullptr) const;
  void apply_inverse(const Vec& x, Vec& y,
                     std::uint64_t* m_count = nullptr) const;
  void apply_inverse_transpose(const Vec& x, Vec& y,
                               std::uint64_t* mt_count = nullptr) const;

  /// Independent block-index ranges [first, last) of the inverse.
  std::vector<std::pair<std::size_t, std::size_t>> chain_partition() const;
  /// Forward substitution restricted to one chain; writes only its blocks
  /// of y (y must already have size dim()).
  void apply_inverse_chain(std::size_t chain, const Vec& x, Vec& y,
                           std::uint64_t* m_count = nullptr) const;

  Eigen::MatrixXd to_dense() const;

 private:
  BlockBandedOperator(std::size_t s, LFlavor f, std::size_t k,
                      std::vector<SubKind> kinds, std::vector<BlockPtr> models);
  void check(const Vec& x) const;
  void inverse_range(std::size_t first, std::size_t last, const Vec& x, Vec& y,
                     std::uint64_t* m_count) const;

  std::size_t s_ = 0;
  LFlavor flavor_ = LFlavor::Exact;
  std::size_t k_ = 0;
  std::vector<SubKind> kinds_;
  std::vector<BlockPtr> models_;  // size N; may hold nullptr for non-model kinds
  std::vector<std::pair<std::size_t, std::size_t>> chains_;
};

}  // namespace wc4dvar

#endif
