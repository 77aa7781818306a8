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

#ifndef WC4DVAR_EIGENSOLVE_HPP
#define WC4DVAR_EIGENSOLVE_HPP

#include <Eigen/Dense>

#include "wc4dvar/common.hpp"
#include "wc4dvar/sparse.hpp"

namespace wc4dvar {

enum class EigWhich { Smallest, Largest, KSmallest, KLargest };

struct EigOptions {
  std::size_t dense_threshold = 2000;
  double tol = 1e-8;
  std::size_t max_iter = 0;  // 0: min(n, 600)
};

struct EigResult {
  Vec values;               // ascending
  Eigen::MatrixXd vectors;  // n x values.size()
  bool converged = true;
  bool dense = true;
};

/// Extreme eigenpairs of a symmetric operator. Dense eigendecomposition for
/// n <= dense_threshold, Lanczos with full reorthogonalization otherwise.
/// For Smallest/Largest, k is ignored.
EigResult sym_eig_extremes(const LinearMap& apply, std::size_t n,
                           EigWhich which, std::size_t k = 1,
                           const EigOptions& opt = {});
EigResult sym_eig_extremes(const SparseSym& a, EigWhich which,
                           std::size_t k = 1, const EigOptions& opt = {});

/// Assembles the dense matrix of a linear map by applying it to unit vectors.
Eigen::MatrixXd materialize(const LinearMap& apply, std::size_t n);

}  // namespace wc4dvar

#endif
