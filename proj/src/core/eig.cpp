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

#include <algorithm>

#include "wc4dvar/eigensolve.hpp"

namespace wc4dvar {

Eigen::MatrixXd materialize(const LinearMap& apply, std::size_t n) {
  Eigen::MatrixXd a(n, n);
  Vec e(n, 0.0), y;
  for (std::size_t j = 0; j < n; ++j) {
    e[j] = 1.0;
    apply(e, y);
    require_dim(y.size(), n, "materialize");
    for (std::size_t i = 0; i < n; ++i) a(i, j) = y[i];
    e[j] = 0.0;
  }
  return a;
}

namespace {

std::size_t wanted_count(EigWhich which, std::size_t k, std::size_t n) {
  std::size_t c = (which == EigWhich::Smallest || which == EigWhich::Largest)
                      ? 1
                      : k;
  require(c >= 1, ErrorCode::InvalidArgument, "sym_eig_extremes: k must be >= 1");
  return std::min(c, n);
}

// Picks `count` columns from an ascending eigen-decomposition.
void select(const Eigen::VectorXd& vals, const Eigen::MatrixXd& vecs,
            EigWhich which, std::size_t count, EigResult& out) {
  const auto n = static_cast<std::size_t>(vals.size());
  const bool low = which == EigWhich::Smallest || which == EigWhich::KSmallest;
  const std::size_t first = low ? 0 : n - count;
  out.values.resize(count);
  out.vectors.resize(vecs.rows(), static_cast<Eigen::Index>(count));
  for (std::size_t c = 0; c < count; ++c) {
    out.values[c] = vals(static_cast<Eigen::Index>(first + c));
    out.vectors.col(static_cast<Eigen::Index>(c)) =
        vecs.col(static_cast<Eigen::Index>(first + c));
  }
}

EigResult lanczos(const LinearMap& apply, std::size_t n, EigWhich which,
                  std::size_t count, const EigOptions& opt) {
  const std::size_t cap =
      std::min(n, opt.max_iter ? opt.max_iter : std::size_t{600});
  Eigen::MatrixXd v(n, cap + 1);
  std::vector<double> alpha, beta;
  Eigen::VectorXd q(n);
  for (std::size_t i = 0; i < n; ++i)
    q(i) = 1.0 + 0.5 * std::sin(0.7 * static_cast<double>(i) + 0.3);
  v.col(0) = q / q.norm();

  Vec x(n), y;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> tes;
  Eigen::VectorXd best;
  Eigen::MatrixXd best_vecs;
  bool done = false;
  std::size_t m = 0;
  for (std::size_t j = 0; j < cap && !done; ++j) {
    Eigen::Map<Eigen::VectorXd>(x.data(), n) = v.col(j);
    apply(x, y);
    Eigen::Map<const Eigen::VectorXd> w0(y.data(), n);
    Eigen::VectorXd w = w0;
    const double a = v.col(j).dot(w);
    alpha.push_back(a);
    for (int pass = 0; pass < 2; ++pass)
      for (std::size_t i = 0; i <= j; ++i) w -= v.col(i).dot(w) * v.col(i);
    const double b = w.norm();
    m = j + 1;

    Eigen::MatrixXd t = Eigen::MatrixXd::Zero(m, m);
    for (std::size_t i = 0; i < m; ++i) {
      t(i, i) = alpha[i];
      if (i + 1 < m) t(i, i + 1) = t(i + 1, i) = beta[i];
    }
    tes.compute(t);
    const Eigen::VectorXd& th = tes.eigenvalues();
    const Eigen::MatrixXd& s = tes.eigenvectors();
    const bool invariant = b <= 1e-13 * std::max(1.0, th.cwiseAbs().maxCoeff());
    if (m >= count) {
      bool ok = true;
      const bool low =
          which == EigWhich::Smallest || which == EigWhich::KSmallest;
      for (std::size_t c = 0; c < count; ++c) {
        const auto idx = static_cast<Eigen::Index>(low ? c : m - count + c);
        const double res = b * std::abs(s(m - 1, idx));
        if (res > opt.tol * std::max(1.0, std::abs(th(idx)))) ok = false;
      }
      best = th;
      best_vecs = v.leftCols(m) * s;
      if (ok || invariant || m == n) done = true;
    }
    if (invariant && !done) {
      // restart with a vector orthogonal to the current basis
      Eigen::VectorXd r = Eigen::VectorXd::Zero(n);
      r(static_cast<Eigen::Index>(m % n)) = 1.0;
      for (int pass = 0; pass < 2; ++pass)
        for (std::size_t i = 0; i < m; ++i) r -= v.col(i).dot(r) * v.col(i);
      beta.push_back(0.0);
      v.col(j + 1) = r / r.norm();
      continue;
    }
    beta.push_back(b);
    if (!done) v.col(j + 1) = w / b;
  }
  EigResult out;
  out.dense = false;
  out.converged = done;
  if (best.size() == 0) {
    throw NotConvergedError("sym_eig_extremes: Lanczos produced no estimate",
                            {});
  }
  select(best, best_vecs, which, count, out);
  if (!done) {
    throw NotConvergedError(
        "sym_eig_extremes: Lanczos did not converge within " +
            std::to_string(cap) + " iterations",
        out.values);
  }
  return out;
}

}  // namespace

EigResult sym_eig_extremes(const LinearMap& apply, std::size_t n,
                           EigWhich which, std::size_t k,
                           const EigOptions& opt) {
  require(n > 0, ErrorCode::InvalidArgument, "sym_eig_extremes: empty operator");
  const std::size_t count = wanted_count(which, k, n);
  if (n <= opt.dense_threshold) {
    Eigen::MatrixXd a = materialize(apply, n);
    Eigen::MatrixXd sym = 0.5 * (a + a.transpose());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sym);
    require(es.info() == Eigen::Success, ErrorCode::Numerical,
            "sym_eig_extremes: dense eigensolver failed");
    EigResult out;
    select(es.eigenvalues(), es.eigenvectors(), which, count, out);
    return out;
  }
  return lanczos(apply, n, which, count, opt);
}

EigResult sym_eig_extremes(const SparseSym& a, EigWhich which, std::size_t k,
                           const EigOptions& opt) {
  if (a.dim() <= opt.dense_threshold) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a.to_dense());
    require(es.info() == Eigen::Success, ErrorCode::Numerical,
            "sym_eig_extremes: dense eigensolver failed");
    EigResult out;
    select(es.eigenvalues(), es.eigenvectors(), which,
           wanted_count(which, k, a.dim()), out);
    return out;
  }
  return sym_eig_extremes([&a](const Vec& x, Vec& y) { a.multiply(x, y); },
                          a.dim(), which, k, opt);
}

}  // namespace wc4dvar
