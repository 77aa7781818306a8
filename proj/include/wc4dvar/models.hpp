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

#ifndef WC4DVAR_MODELS_HPP
#define WC4DVAR_MODELS_HPP

#include <array>
#include <memory>

#include <Eigen/Dense>

#include "wc4dvar/common.hpp"
#include "wc4dvar/sparse.hpp"

namespace wc4dvar {

/// An s x s linear operator with an exact adjoint.
class LinearBlock {
 public:
  virtual ~LinearBlock() = default;
  virtual std::size_t dim() const = 0;
  virtual void apply(const Vec& x, Vec& y) const = 0;
  virtual void apply_transpose(const Vec& x, Vec& y) const = 0;
  Eigen::MatrixXd to_dense() const;
};

using BlockPtr = std::shared_ptr<const LinearBlock>;

/// Dense block, mostly for tests and small oracles.
class MatrixBlock final : public LinearBlock {
 public:
  explicit MatrixBlock(Eigen::MatrixXd m);
  std::size_t dim() const override { return static_cast<std::size_t>(m_.rows()); }
  void apply(const Vec& x, Vec& y) const override;
  void apply_transpose(const Vec& x, Vec& y) const override;
  const Eigen::MatrixXd& matrix() const { return m_; }

 private:
  Eigen::MatrixXd m_;
};

// ---- Lorenz 96 ----

struct Lorenz96Model {
  std::size_t s = 40;
  double forcing = 8.0;
  double dt = 1e-4;
  std::size_t steps = 10;  // RK4 steps per subwindow

  void validate() const;
};

Vec lorenz_rhs(const Vec& x, double forcing = 8.0);
/// Jacobian-vector product of the tendency at x.
Vec lorenz_jvp(const Vec& x, const Vec& v);
/// Transposed Jacobian-vector product of the tendency at x.
Vec lorenz_jtvp(const Vec& x, const Vec& w);
Vec rk4_step(const Lorenz96Model& model, const Vec& x);
Vec integrate(const Lorenz96Model& model, Vec x, std::size_t nsteps);
/// State after spin-up from (F, ..., F) + 0.01 e_1.
Vec lorenz_spun_up_state(const Lorenz96Model& model,
                         std::size_t spinup_steps = 1000);

/// Tangent linear of `steps` composed RK4 steps along the trajectory from x0.
class Rk4TangentLinear final : public LinearBlock {
 public:
  Rk4TangentLinear(const Lorenz96Model& model, const Vec& x0);
  std::size_t dim() const override { return model_.s; }
  void apply(const Vec& x, Vec& y) const override;
  void apply_transpose(const Vec& x, Vec& y) const override;
  /// Nonlinear state at the end of the subwindow.
  const Vec& end_state() const { return end_; }

 private:
  Lorenz96Model model_;
  std::vector<std::array<Vec, 4>> stages_;  // RK4 stage states per step
  Vec end_;
};

/// Tangent linear blocks M_1..M_N along one nonlinear trajectory starting
/// from a spun-up state.
std::vector<BlockPtr> lorenz_tlm_blocks(const Lorenz96Model& model,
                                        std::size_t n_subwindows,
                                        std::size_t spinup_steps = 1000);

// ---- heat equation ----

struct HeatModel {
  std::size_t s = 50;
  double r = 0.4;
  std::size_t steps = 10;  // forward Euler steps per subwindow

  /// Throws if r <= 0; returns false (spectral theory inapplicable) if r > 1/2.
  bool validate() const;
};

/// Single-step matrix: zero first and last rows and columns, interior
/// tridiagonal (r, 1 - 2r, r).
SparseSym heat_step_matrix(const HeatModel& model);

/// The subwindow block M_dt^steps applied by repeated matvec.
class HeatBlock final : public LinearBlock {
 public:
  explicit HeatBlock(const HeatModel& model);
  std::size_t dim() const override { return step_.dim(); }
  void apply(const Vec& x, Vec& y) const override;
  void apply_transpose(const Vec& x, Vec& y) const override;
  const SparseSym& step_matrix() const { return step_; }
  std::size_t steps() const { return steps_; }

 private:
  SparseSym step_;
  std::size_t steps_;
};

}  // namespace wc4dvar

#endif
