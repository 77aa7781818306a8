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

#ifndef WC4DVAR_SPECTRA_HPP
#define WC4DVAR_SPECTRA_HPP

#include <utility>

#include <Eigen/Dense>

#include "wc4dvar/eigensolve.hpp"
#include "wc4dvar/saddle.hpp"

namespace wc4dvar {

/// Extreme eigenvalues of D_hat^{-1} D, R_hat^{-1} R, S_tilde^{-1} S and
/// (L_hat' L_hat)^{-1} L' L, plus the condition number of D.
struct SpectralSummary {
  double lD = 1, LD = 1;
  double lR = 1, LR = 1;
  double lS = 1, LS = 1;
  double lL = 1, LL = 1;
  double kappaD = 1;
};

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
  bool contains(double x, double slack = 0.0) const {
    return x >= lo - slack && x <= hi + slack;
  }
};

struct IntervalUnion {
  Interval negative, middle, positive;
  bool contains(double x, double slack = 0.0) const {
    return negative.contains(x, slack) || middle.contains(x, slack) ||
           positive.contains(x, slack);
  }
};

IntervalUnion saddle_intervals(const SpectralSummary& s);

/// Lower bound on the number of unit eigenvalues of
/// L_M^{-T} L^T L L_M^{-1}: (N + 1 - 2 floor(N/k)) s. Requires k >= 2.
std::size_t unit_eigenvalue_count(std::size_t n, std::size_t k, std::size_t s);

double lm_upper_bound(double k);  // k + 1 + 2 sqrt(k)
double lm_tight_bound(double k);        // 1 + k + sqrt(k), for k < N+1 <= 2k
double lm_k4_bound();                // 5 + sqrt(8), k = 4, N+1 in 9..12

/// Closed-form non-unit eigenvalues (nu_minus, nu_plus) for k = 3,
/// N in {3, 4, 5} and a scalar model eigenvalue mu.
std::pair<double, double> lm_k3_extremes(double mu, std::size_t n = 3,
                                             std::size_t k = 3);

/// Smallest applicable upper bound on the spectrum of the preconditioned
/// model term for |mu| <= 1, over the bounds above.
double applicable_upper_bound(std::size_t n, std::size_t k);

/// Reduced matrix A~(mu) of size k floor(N/k) + 1 for a constant symmetric
/// model with eigenvalue mu.
Eigen::MatrixXd reduced_A_mu(double mu, std::size_t n, std::size_t k);

/// Eigenvalues (ascending) of L_hat^{-T} L^T L L_hat^{-1}.
Vec preconditioned_model_spectrum(const BlockBandedOperator& l,
                                  const BlockBandedOperator& lhat);
/// Extreme eigenvalues (min, max) via Lanczos on the product operator.
std::pair<double, double> preconditioned_model_extremes(
    const BlockBandedOperator& l, const BlockBandedOperator& lhat,
    const EigOptions& opt = {});

/// Eigenvalues of L^T L (ascending, dense).
Vec model_gram_spectrum(const BlockBandedOperator& l);

/// Dense-oracle spectral summary for an operator and a block diagonal
/// preconditioner. Throws for dimensions above `max_dense`.
SpectralSummary spectral_summary(const SaddleOperator& op,
                                 const SaddlePreconditioner& pc,
                                 std::size_t max_dense = 4000);

/// Eigenvalues of P^{-1} A (ascending; real for the block diagonal shape).
Vec preconditioned_saddle_spectrum(const SaddleOperator& op,
                                   const SaddlePreconditioner& pc,
                                   std::size_t max_dense = 4000);

/// Count of values within tol of 1.
std::size_t count_unit(const Vec& values, double tol = 1e-8);

}  // namespace wc4dvar

#endif
