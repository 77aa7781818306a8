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

#ifndef WC4DVAR_KRYLOV_HPP
#define WC4DVAR_KRYLOV_HPP

#include <string>

#include "wc4dvar/common.hpp"

namespace wc4dvar {

struct SolveReport {
  std::size_t iterations = 0;
  bool converged = false;
  double final_relres = 0.0;
  std::vector<double> relres_history;    // true 2-norm residual / ||b||
  std::vector<double> precond_history;   // MINRES: P^{-1}-norm residual
  OpCounters counters;
  double wall_seconds = 0.0;
  std::size_t a_applications = 0;
  std::size_t p_applications = 0;
};

struct KrylovOptions {
  double tol = 1e-6;
  std::size_t maxit = 1000;
  /// MINRES only: replace the recurred residual by b - A x every this many
  /// iterations (0 disables; each refresh costs one extra A application).
  std::size_t residual_refresh = 0;
  /// Named in the error raised when MINRES meets an indefinite preconditioner.
  std::string precond_label = "preconditioner";
};

/// Preconditioned MINRES with zero initial guess. pinv must be SPD.
/// Stops on ||b - A x||_2 / ||b||_2 <= tol.
Vec minres(const LinearMap& a, const LinearMap& pinv, const Vec& b,
           const KrylovOptions& opt, SolveReport& report);

/// Full (unrestarted) right-preconditioned GMRES with modified Gram-Schmidt
/// and zero initial guess.
Vec gmres(const LinearMap& a, const LinearMap& pinv, const Vec& b,
          const KrylovOptions& opt, SolveReport& report);

}  // namespace wc4dvar

#endif
