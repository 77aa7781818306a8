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

// Small random problems and dense helpers shared by the test binaries.

#ifndef WC4DVAR_TEST_FIXTURES_HPP
#define WC4DVAR_TEST_FIXTURES_HPP

#include <memory>

#include <Eigen/Dense>

#include "wc4dvar/eigensolve.hpp"
#include "wc4dvar/saddle.hpp"

namespace wc4dvar::testing {

inline Eigen::VectorXd ev(const Vec& v) {
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

inline Vec vv(const Eigen::VectorXd& v) { return Vec(v.data(), v.data() + v.size()); }

inline double max_abs_diff(const Vec& a, const Eigen::VectorXd& b) {
  return (ev(a) - b).cwiseAbs().maxCoeff();
}

// Diagonally dominant symmetric tridiagonal matrix. IC(0) of a tridiagonal
// matrix is its exact Cholesky factor.
inline SparseSym random_tridiag_spd(std::size_t n, Rng& rng) {
  std::vector<Triplet> t;
  for (std::size_t i = 0; i < n; ++i) {
    t.push_back({i, i, 2.0 + rng.uniform()});
    if (i + 1 < n) t.push_back({i, i + 1, rng.uniform(-0.8, 0.8)});
  }
  return SparseSym::from_upper(n, t);
}

// Dense random SPD matrix stored in full.
inline SparseSym random_dense_spd(std::size_t n, Rng& rng, double ridge = 0.5) {
  Eigen::MatrixXd g(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) g(i, j) = rng.normal();
  Eigen::MatrixXd a = g * g.transpose() / static_cast<double>(n);
  a.diagonal().array() += ridge;
  return SparseSym::from_dense(a);
}

inline BlockPtr random_model(std::size_t s, Rng& rng, double scale = 0.4) {
  Eigen::MatrixXd m(s, s);
  for (std::size_t i = 0; i < s; ++i)
    for (std::size_t j = 0; j < s; ++j) m(i, j) = scale * rng.normal() / std::sqrt(double(s));
  m.diagonal().array() += 1.0;
  return std::make_shared<MatrixBlock>(m);
}

struct SmallProblem {
  std::unique_ptr<SaddleOperator> op;
  std::vector<BlockPtr> models;
  SparseSym ri;
  std::vector<std::size_t> pvec;
};

// D, R built from tridiagonal blocks; random dense models; H with or
// without smoothing (smoothing needs s >= p + 4).
inline SmallProblem make_small_problem(std::size_t s, std::size_t p, std::size_t n,
                                       Rng& rng, bool smoothing = false,
                                       bool d_identity = false) {
  SmallProblem sp;
  for (std::size_t j = 0; j < n; ++j) sp.models.push_back(random_model(s, rng));
  SparseSym b = d_identity ? SparseSym::identity(s) : random_tridiag_spd(s, rng);
  SparseSym q = d_identity ? SparseSym::identity(s) : random_tridiag_spd(s, rng);
  sp.ri = random_tridiag_spd(p, rng);
  sp.pvec = {p};
  ObsOperator h = build_obs_operator(s, p, rng, smoothing, n + 1);
  sp.op = std::make_unique<SaddleOperator>(
      CovarianceSet::make_D(std::move(b), std::move(q), n),
      CovarianceSet::make_R(sp.ri, n + 1), std::move(h),
      BlockBandedOperator::exact(sp.models));
  return sp;
}

inline Eigen::MatrixXd dense_of(const LinearMap& f, std::size_t n) {
  return materialize(f, n);
}

}  // namespace wc4dvar::testing

#endif
