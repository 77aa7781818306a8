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

#include "wc4dvar/sparse.hpp"

#include <algorithm>
#include <map>
#include <sstream>

namespace wc4dvar {

namespace {

// Sorts entries by (row, col), sums duplicates, writes CSR arrays.
void compress(std::size_t rows, std::vector<Triplet>& e,
              std::vector<std::size_t>& ptr, std::vector<std::size_t>& col,
              std::vector<double>& val) {
  std::sort(e.begin(), e.end(), [](const Triplet& a, const Triplet& b) {
    return a.row != b.row ? a.row < b.row : a.col < b.col;
  });
  ptr.assign(rows + 1, 0);
  col.clear();
  val.clear();
  for (std::size_t k = 0; k < e.size(); ++k) {
    if (!col.empty() && k > 0 && e[k].row == e[k - 1].row &&
        e[k].col == e[k - 1].col) {
      val.back() += e[k].value;
      continue;
    }
    col.push_back(e[k].col);
    val.push_back(e[k].value);
    ptr[e[k].row + 1] += 1;
  }
  for (std::size_t i = 0; i < rows; ++i) ptr[i + 1] += ptr[i];
}

}  // namespace

SparseSym SparseSym::from_upper(std::size_t n,
                                const std::vector<Triplet>& upper) {
  std::vector<Triplet> e;
  e.reserve(2 * upper.size() + n);
  for (const auto& t : upper) {
    require(t.row < n && t.col < n, ErrorCode::Dimension,
            "SparseSym: index out of range");
    require(t.row <= t.col, ErrorCode::InvalidArgument,
            "SparseSym::from_upper: entry below the diagonal");
    e.push_back(t);
    if (t.row != t.col) e.push_back({t.col, t.row, t.value});
  }
  for (std::size_t i = 0; i < n; ++i) e.push_back({i, i, 0.0});
  SparseSym s;
  s.n_ = n;
  compress(n, e, s.ptr_, s.col_, s.val_);
  return s;
}

SparseSym SparseSym::from_dense(const Eigen::MatrixXd& a, double drop) {
  require(a.rows() == a.cols(), ErrorCode::Dimension,
          "SparseSym::from_dense: matrix not square");
  const auto n = static_cast<std::size_t>(a.rows());
  std::vector<Triplet> up;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j) {
      const double v = 0.5 * (a(i, j) + a(j, i));
      if (i == j || std::abs(v) > drop) up.push_back({i, j, v});
    }
  return from_upper(n, up);
}

SparseSym SparseSym::identity(std::size_t n) {
  return diagonal_matrix(Vec(n, 1.0));
}

SparseSym SparseSym::diagonal_matrix(const Vec& d) {
  std::vector<Triplet> up;
  for (std::size_t i = 0; i < d.size(); ++i) up.push_back({i, i, d[i]});
  return from_upper(d.size(), up);
}

void SparseSym::multiply(const Vec& x, Vec& y) const {
  require_dim(x.size(), n_, "SparseSym::multiply");
  y.assign(n_, 0.0);
  for (std::size_t i = 0; i < n_; ++i) {
    double s = 0.0;
    for (std::size_t k = ptr_[i]; k < ptr_[i + 1]; ++k) s += val_[k] * x[col_[k]];
    y[i] = s;
  }
}

Vec SparseSym::multiply(const Vec& x) const {
  Vec y;
  multiply(x, y);
  return y;
}

Vec SparseSym::diagonal() const {
  Vec d(n_, 0.0);
  for (std::size_t i = 0; i < n_; ++i) d[i] = at(i, i);
  return d;
}

double SparseSym::at(std::size_t i, std::size_t j) const {
  auto b = col_.begin() + static_cast<std::ptrdiff_t>(ptr_[i]);
  auto e = col_.begin() + static_cast<std::ptrdiff_t>(ptr_[i + 1]);
  auto it = std::lower_bound(b, e, j);
  if (it == e || *it != j) return 0.0;
  return val_[static_cast<std::size_t>(it - col_.begin())];
}

Eigen::MatrixXd SparseSym::to_dense() const {
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n_, n_);
  for (std::size_t i = 0; i < n_; ++i)
    for (std::size_t k = ptr_[i]; k < ptr_[i + 1]; ++k) a(i, col_[k]) = val_[k];
  return a;
}

SparseSym SparseSym::shifted(double shift) const {
  SparseSym s = *this;
  for (std::size_t i = 0; i < n_; ++i)
    for (std::size_t k = ptr_[i]; k < ptr_[i + 1]; ++k)
      if (col_[k] == i) s.val_[k] += shift;
  return s;
}

SparseSym SparseSym::principal(std::size_t lo, std::size_t hi) const {
  require(lo <= hi && hi <= n_, ErrorCode::Dimension,
          "SparseSym::principal: bad range");
  std::vector<Triplet> up;
  for (std::size_t i = lo; i < hi; ++i)
    for (std::size_t k = ptr_[i]; k < ptr_[i + 1]; ++k)
      if (col_[k] >= i && col_[k] < hi)
        up.push_back({i - lo, col_[k] - lo, val_[k]});
  return from_upper(hi - lo, up);
}

CsrMatrix::CsrMatrix(std::size_t rows, std::size_t cols,
                     std::vector<Triplet> entries)
    : rows_(rows), cols_(cols) {
  for (const auto& t : entries)
    require(t.row < rows && t.col < cols, ErrorCode::Dimension,
            "CsrMatrix: index out of range");
  compress(rows, entries, ptr_, col_, val_);
}

void CsrMatrix::multiply(const Vec& x, Vec& y) const {
  require_dim(x.size(), cols_, "CsrMatrix::multiply");
  y.assign(rows_, 0.0);
  for (std::size_t i = 0; i < rows_; ++i) {
    double s = 0.0;
    for (std::size_t k = ptr_[i]; k < ptr_[i + 1]; ++k) s += val_[k] * x[col_[k]];
    y[i] = s;
  }
}

void CsrMatrix::multiply_transpose(const Vec& x, Vec& y) const {
  require_dim(x.size(), rows_, "CsrMatrix::multiply_transpose");
  y.assign(cols_, 0.0);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t k = ptr_[i]; k < ptr_[i + 1]; ++k)
      y[col_[k]] += val_[k] * x[i];
}

Eigen::MatrixXd CsrMatrix::to_dense() const {
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(rows_, cols_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t k = ptr_[i]; k < ptr_[i + 1]; ++k) a(i, col_[k]) = val_[k];
  return a;
}

Eigen::MatrixXd IncChol::lower_dense() const {
  Eigen::MatrixXd g = Eigen::MatrixXd::Zero(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = ptr[i]; k < ptr[i + 1]; ++k) g(i, col[k]) = val[k];
  return g;
}

namespace {

// One IC(0) attempt; returns false on a nonpositive pivot.
bool try_ichol(const SparseSym& a, double shift, IncChol& f) {
  const std::size_t n = a.dim();
  const auto& ap = a.row_ptr();
  const auto& ac = a.col_idx();
  const auto& av = a.values();
  f.n = n;
  f.shift = shift;
  f.ptr.assign(n + 1, 0);
  f.col.clear();
  f.val.clear();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = ap[i]; k < ap[i + 1]; ++k)
      if (ac[k] <= i) ++f.ptr[i + 1];
  for (std::size_t i = 0; i < n; ++i) f.ptr[i + 1] += f.ptr[i];
  f.col.resize(f.ptr[n]);
  f.val.resize(f.ptr[n]);

  for (std::size_t i = 0; i < n; ++i) {
    std::size_t w = f.ptr[i];
    for (std::size_t k = ap[i]; k < ap[i + 1] && ac[k] <= i; ++k, ++w) {
      const std::size_t j = ac[k];
      f.col[w] = j;
      // sparse dot of row i (entries already written, cols < j) and row j
      double s = 0.0;
      std::size_t p = f.ptr[i];
      std::size_t q = f.ptr[j];
      const std::size_t qe = f.ptr[j + 1] - 1;  // exclude diag of row j
      while (p < w && q < qe) {
        if (f.col[p] == f.col[q]) {
          s += f.val[p] * f.val[q];
          ++p;
          ++q;
        } else if (f.col[p] < f.col[q]) {
          ++p;
        } else {
          ++q;
        }
      }
      if (j < i) {
        f.val[w] = (av[k] - s) / f.val[f.ptr[j + 1] - 1];
      } else {
        const double piv = av[k] + shift - s;
        if (!(piv > 0.0)) return false;
        f.val[w] = std::sqrt(piv);
      }
    }
  }
  return true;
}

}  // namespace

IncChol ichol_zero_fill(const SparseSym& a) {
  double dmax = 0.0;
  for (std::size_t i = 0; i < a.dim(); ++i) {
    const double d = a.at(i, i);
    require(d > 0.0, ErrorCode::InvalidArgument,
            "ichol_zero_fill: nonpositive diagonal entry");
    dmax = std::max(dmax, d);
  }
  IncChol f;
  if (try_ichol(a, 0.0, f)) return f;
  for (double alpha = 1e-3; alpha < 1e6; alpha *= 2.0)
    if (try_ichol(a, alpha * dmax, f)) return f;
  throw Error(ErrorCode::Numerical, "ichol_zero_fill: breakdown persists");
}

void solve_with_factor(const IncChol& f, const Vec& b, Vec& x) {
  require_dim(b.size(), f.n, "solve_with_factor");
  const std::size_t n = f.n;
  x = b;
  // G y = b
  for (std::size_t i = 0; i < n; ++i) {
    double s = x[i];
    const std::size_t d = f.ptr[i + 1] - 1;
    for (std::size_t k = f.ptr[i]; k < d; ++k) s -= f.val[k] * x[f.col[k]];
    x[i] = s / f.val[d];
  }
  // G^T x = y, column sweep over the rows of G
  for (std::size_t i = n; i-- > 0;) {
    const std::size_t d = f.ptr[i + 1] - 1;
    x[i] /= f.val[d];
    const double xi = x[i];
    for (std::size_t k = f.ptr[i]; k < d; ++k) x[f.col[k]] -= f.val[k] * xi;
  }
}

Vec solve_with_factor(const IncChol& f, const Vec& b) {
  Vec x;
  solve_with_factor(f, b, x);
  return x;
}

LowRankUpdateInverse::LowRankUpdateInverse(IncChol base, Eigen::MatrixXd v,
                                           Eigen::VectorXd c)
    : base_(std::move(base)), v_(std::move(v)), c_(std::move(c)) {
  const auto m = v_.cols();
  require(static_cast<std::size_t>(v_.rows()) == base_.n || m == 0,
          ErrorCode::Dimension, "LowRankUpdateInverse: V has wrong row count");
  require(c_.size() == m, ErrorCode::Dimension,
          "LowRankUpdateInverse: C and V disagree on rank");
  if (m == 0) return;
  w_.resize(v_.rows(), m);
  Vec col(base_.n), out;
  for (Eigen::Index j = 0; j < m; ++j) {
    for (std::size_t i = 0; i < base_.n; ++i) col[i] = v_(i, j);
    solve_with_factor(base_, col, out);
    for (std::size_t i = 0; i < base_.n; ++i) w_(i, j) = out[i];
  }
  Eigen::MatrixXd cap = v_.transpose() * w_;
  for (Eigen::Index j = 0; j < m; ++j) {
    if (c_(j) == 0.0)
      throw Error(ErrorCode::Numerical,
                  "LowRankUpdateInverse: zero update coefficient");
    cap(j, j) += 1.0 / c_(j);
  }
  cap_.compute(cap);
  const double rc = cap_.rcond();
  if (!(rc > 1e-14)) {
    std::ostringstream os;
    os << "LowRankUpdateInverse: singular capacitance matrix (condition "
          "estimate "
       << (rc > 0.0 ? 1.0 / rc : INFINITY) << ")";
    throw Error(ErrorCode::Numerical, os.str());
  }
}

void LowRankUpdateInverse::solve(const Vec& b, Vec& x) const {
  solve_with_factor(base_, b, x);
  if (v_.cols() == 0) return;
  Eigen::Map<Eigen::VectorXd> xm(x.data(), static_cast<Eigen::Index>(x.size()));
  Eigen::VectorXd t = cap_.solve(v_.transpose() * xm);
  xm -= w_ * t;
}

Vec woodbury_solve(const LowRankUpdateInverse& w, const Vec& b) {
  Vec x;
  w.solve(b, x);
  return x;
}

}  // namespace wc4dvar
