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

#ifndef WC4DVAR_SPARSE_HPP
#define WC4DVAR_SPARSE_HPP

#include <Eigen/Dense>

#include "wc4dvar/common.hpp"

namespace wc4dvar {

struct Triplet {
  std::size_t row;
  std::size_t col;
  double value;
};

/// Symmetric matrix in CSR form with the full pattern stored.
/// Column indices are sorted within each row and every diagonal entry is
/// structurally present.
class SparseSym {
 public:
  SparseSym() = default;

  /// Builds from entries of the upper triangle (row <= col). Each
  /// off-diagonal entry is mirrored; duplicates are summed.
  static SparseSym from_upper(std::size_t n, const std::vector<Triplet>& upper);
  /// Entries with |a_ij| <= drop are omitted (diagonal always kept).
  static SparseSym from_dense(const Eigen::MatrixXd& a, double drop = 0.0);
  static SparseSym identity(std::size_t n);
  static SparseSym diagonal_matrix(const Vec& d);

  std::size_t dim() const { return n_; }
  std::size_t nnz() const { return val_.size(); }

  void multiply(const Vec& x, Vec& y) const;
  Vec multiply(const Vec& x) const;
  Vec diagonal() const;
  double at(std::size_t i, std::size_t j) const;
  Eigen::MatrixXd to_dense() const;

  /// Returns A + shift * I.
  SparseSym shifted(double shift) const;
  /// Principal submatrix on the contiguous index range [lo, hi).
  SparseSym principal(std::size_t lo, std::size_t hi) const;

  const std::vector<std::size_t>& row_ptr() const { return ptr_; }
  const std::vector<std::size_t>& col_idx() const { return col_; }
  const std::vector<double>& values() const { return val_; }

 private:
  std::size_t n_ = 0;
  std::vector<std::size_t> ptr_{0};
  std::vector<std::size_t> col_;
  std::vector<double> val_;
};

/// General rectangular CSR matrix.
class CsrMatrix {
 public:
  CsrMatrix() = default;
  CsrMatrix(std::size_t rows, std::size_t cols, std::vector<Triplet> entries);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t nnz() const { return val_.size(); }

  void multiply(const Vec& x, Vec& y) const;
  void multiply_transpose(const Vec& x, Vec& y) const;
  Eigen::MatrixXd to_dense() const;

  const std::vector<std::size_t>& row_ptr() const { return ptr_; }
  const std::vector<std::size_t>& col_idx() const { return col_; }
  const std::vector<double>& values() const { return val_; }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<std::size_t> ptr_{0};
  std::vector<std::size_t> col_;
  std::vector<double> val_;
};

/// Lower triangular incomplete Cholesky factor G (row storage, diagonal last
/// in each row) with G G^T ~= A + shift * I.
struct IncChol {
  std::size_t n = 0;
  std::vector<std::size_t> ptr{0};
  std::vector<std::size_t> col;
  std::vector<double> val;
  double shift = 0.0;

  Eigen::MatrixXd lower_dense() const;
};

/// Zero-fill incomplete Cholesky. On a nonpositive pivot, retries with
/// shift alpha * max|diag(A)|, alpha = 1e-3, 2e-3, 4e-3, ...
IncChol ichol_zero_fill(const SparseSym& a);

/// Returns (G G^T)^{-1} b.
Vec solve_with_factor(const IncChol& f, const Vec& b);
void solve_with_factor(const IncChol& f, const Vec& b, Vec& x);

/// (G G^T + V C V^T)^{-1} through the Woodbury identity.
class LowRankUpdateInverse {
 public:
  LowRankUpdateInverse(IncChol base, Eigen::MatrixXd v, Eigen::VectorXd c);

  std::size_t dim() const { return base_.n; }
  std::size_t rank() const { return static_cast<std::size_t>(v_.cols()); }
  const IncChol& base() const { return base_; }
  const Eigen::MatrixXd& vectors() const { return v_; }
  const Eigen::VectorXd& coefficients() const { return c_; }
  void solve(const Vec& b, Vec& x) const;

 private:
  IncChol base_;
  Eigen::MatrixXd v_;
  Eigen::VectorXd c_;
  Eigen::MatrixXd w_;  // (G G^T)^{-1} V
  Eigen::PartialPivLU<Eigen::MatrixXd> cap_;
};

Vec woodbury_solve(const LowRankUpdateInverse& w, const Vec& b);

}  // namespace wc4dvar

#endif
