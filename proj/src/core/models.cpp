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

#include "wc4dvar/models.hpp"

#include <iostream>

namespace wc4dvar {

Eigen::MatrixXd LinearBlock::to_dense() const {
  const std::size_t n = dim();
  Eigen::MatrixXd a(n, n);
  Vec e(n, 0.0), y;
  for (std::size_t j = 0; j < n; ++j) {
    e[j] = 1.0;
    apply(e, y);
    for (std::size_t i = 0; i < n; ++i) a(i, j) = y[i];
    e[j] = 0.0;
  }
  return a;
}

MatrixBlock::MatrixBlock(Eigen::MatrixXd m) : m_(std::move(m)) {
  require(m_.rows() == m_.cols(), ErrorCode::Dimension,
          "MatrixBlock: matrix not square");
}

void MatrixBlock::apply(const Vec& x, Vec& y) const {
  require_dim(x.size(), dim(), "MatrixBlock::apply");
  y.resize(dim());
  Eigen::Map<Eigen::VectorXd>(y.data(), m_.rows()) =
      m_ * Eigen::Map<const Eigen::VectorXd>(x.data(), m_.cols());
}

void MatrixBlock::apply_transpose(const Vec& x, Vec& y) const {
  require_dim(x.size(), dim(), "MatrixBlock::apply_transpose");
  y.resize(dim());
  Eigen::Map<Eigen::VectorXd>(y.data(), m_.cols()) =
      m_.transpose() * Eigen::Map<const Eigen::VectorXd>(x.data(), m_.rows());
}

void Lorenz96Model::validate() const {
  require(s >= 4, ErrorCode::InvalidArgument, "Lorenz96: s must be >= 4");
  require(dt > 0.0, ErrorCode::InvalidArgument, "Lorenz96: dt must be > 0");
  require(steps >= 1, ErrorCode::InvalidArgument,
          "Lorenz96: steps per subwindow must be >= 1");
}

namespace {

inline std::size_t wrap(std::ptrdiff_t i, std::size_t n) {
  const auto m = static_cast<std::ptrdiff_t>(n);
  return static_cast<std::size_t>(((i % m) + m) % m);
}

}  // namespace

Vec lorenz_rhs(const Vec& x, double forcing) {
  const std::size_t n = x.size();
  require(n >= 4, ErrorCode::InvalidArgument, "lorenz_rhs: s must be >= 4");
  Vec f(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto ii = static_cast<std::ptrdiff_t>(i);
    f[i] = (x[wrap(ii + 1, n)] - x[wrap(ii - 2, n)]) * x[wrap(ii - 1, n)] -
           x[i] + forcing;
  }
  return f;
}

Vec lorenz_jvp(const Vec& x, const Vec& v) {
  const std::size_t n = x.size();
  Vec out(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto ii = static_cast<std::ptrdiff_t>(i);
    const std::size_t ip1 = wrap(ii + 1, n), im1 = wrap(ii - 1, n),
                      im2 = wrap(ii - 2, n);
    out[i] = x[im1] * (v[ip1] - v[im2]) + (x[ip1] - x[im2]) * v[im1] - v[i];
  }
  return out;
}

Vec lorenz_jtvp(const Vec& x, const Vec& w) {
  const std::size_t n = x.size();
  Vec out(n);
  for (std::size_t j = 0; j < n; ++j) {
    const auto jj = static_cast<std::ptrdiff_t>(j);
    const std::size_t jm2 = wrap(jj - 2, n), jm1 = wrap(jj - 1, n),
                      jp1 = wrap(jj + 1, n), jp2 = wrap(jj + 2, n);
    out[j] = x[jm2] * w[jm1] - x[jp1] * w[jp2] + (x[jp2] - x[jm1]) * w[jp1] -
             w[j];
  }
  return out;
}

namespace {

struct Stages {
  Vec x1, x2, x3, x4;
};

Stages rk4_stages(const Vec& x, double dt, double forcing, Vec* next) {
  const std::size_t n = x.size();
  Stages st;
  st.x1 = x;
  Vec k1 = lorenz_rhs(x, forcing);
  st.x2.resize(n);
  for (std::size_t i = 0; i < n; ++i) st.x2[i] = x[i] + 0.5 * dt * k1[i];
  Vec k2 = lorenz_rhs(st.x2, forcing);
  st.x3.resize(n);
  for (std::size_t i = 0; i < n; ++i) st.x3[i] = x[i] + 0.5 * dt * k2[i];
  Vec k3 = lorenz_rhs(st.x3, forcing);
  st.x4.resize(n);
  for (std::size_t i = 0; i < n; ++i) st.x4[i] = x[i] + dt * k3[i];
  if (next) {
    Vec k4 = lorenz_rhs(st.x4, forcing);
    next->resize(n);
    for (std::size_t i = 0; i < n; ++i)
      (*next)[i] = x[i] + dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
  }
  return st;
}

}  // namespace

Vec rk4_step(const Lorenz96Model& model, const Vec& x) {
  model.validate();
  require_dim(x.size(), model.s, "rk4_step");
  Vec next;
  rk4_stages(x, model.dt, model.forcing, &next);
  return next;
}

Vec integrate(const Lorenz96Model& model, Vec x, std::size_t nsteps) {
  for (std::size_t t = 0; t < nsteps; ++t) x = rk4_step(model, x);
  return x;
}

Vec lorenz_spun_up_state(const Lorenz96Model& model, std::size_t spinup_steps) {
  model.validate();
  Vec x(model.s, model.forcing);
  x[0] += 0.01;
  return integrate(model, std::move(x), spinup_steps);
}

Rk4TangentLinear::Rk4TangentLinear(const Lorenz96Model& model, const Vec& x0)
    : model_(model) {
  model_.validate();
  require_dim(x0.size(), model_.s, "Rk4TangentLinear");
  Vec x = x0;
  stages_.reserve(model_.steps);
  for (std::size_t t = 0; t < model_.steps; ++t) {
    Vec next;
    Stages st = rk4_stages(x, model_.dt, model_.forcing, &next);
    stages_.push_back({std::move(st.x1), std::move(st.x2), std::move(st.x3),
                       std::move(st.x4)});
    x = std::move(next);
  }
  end_ = std::move(x);
}

void Rk4TangentLinear::apply(const Vec& v_in, Vec& y) const {
  require_dim(v_in.size(), model_.s, "Rk4TangentLinear::apply");
  const double dt = model_.dt;
  const std::size_t n = model_.s;
  Vec v = v_in, u(n);
  for (const auto& st : stages_) {
    Vec d1 = lorenz_jvp(st[0], v);
    for (std::size_t i = 0; i < n; ++i) u[i] = v[i] + 0.5 * dt * d1[i];
    Vec d2 = lorenz_jvp(st[1], u);
    for (std::size_t i = 0; i < n; ++i) u[i] = v[i] + 0.5 * dt * d2[i];
    Vec d3 = lorenz_jvp(st[2], u);
    for (std::size_t i = 0; i < n; ++i) u[i] = v[i] + dt * d3[i];
    Vec d4 = lorenz_jvp(st[3], u);
    for (std::size_t i = 0; i < n; ++i)
      v[i] += dt / 6.0 * (d1[i] + 2.0 * d2[i] + 2.0 * d3[i] + d4[i]);
  }
  y = std::move(v);
}

void Rk4TangentLinear::apply_transpose(const Vec& w_in, Vec& y) const {
  require_dim(w_in.size(), model_.s, "Rk4TangentLinear::apply_transpose");
  const double dt = model_.dt;
  const std::size_t n = model_.s;
  Vec gv = w_in;
  for (auto it = stages_.rbegin(); it != stages_.rend(); ++it) {
    const auto& st = *it;
    const Vec w = gv;
    Vec g1(n), g2(n), g3(n), g4(n);
    for (std::size_t i = 0; i < n; ++i) {
      g1[i] = dt / 6.0 * w[i];
      g2[i] = dt / 3.0 * w[i];
      g3[i] = dt / 3.0 * w[i];
      g4[i] = dt / 6.0 * w[i];
    }
    Vec gu = lorenz_jtvp(st[3], g4);
    for (std::size_t i = 0; i < n; ++i) {
      gv[i] += gu[i];
      g3[i] += dt * gu[i];
    }
    gu = lorenz_jtvp(st[2], g3);
    for (std::size_t i = 0; i < n; ++i) {
      gv[i] += gu[i];
      g2[i] += 0.5 * dt * gu[i];
    }
    gu = lorenz_jtvp(st[1], g2);
    for (std::size_t i = 0; i < n; ++i) {
      gv[i] += gu[i];
      g1[i] += 0.5 * dt * gu[i];
    }
    gu = lorenz_jtvp(st[0], g1);
    for (std::size_t i = 0; i < n; ++i) gv[i] += gu[i];
  }
  y = std::move(gv);
}

std::vector<BlockPtr> lorenz_tlm_blocks(const Lorenz96Model& model,
                                        std::size_t n_subwindows,
                                        std::size_t spinup_steps) {
  std::vector<BlockPtr> blocks;
  Vec x = lorenz_spun_up_state(model, spinup_steps);
  for (std::size_t j = 0; j < n_subwindows; ++j) {
    auto b = std::make_shared<Rk4TangentLinear>(model, x);
    x = b->end_state();
    blocks.push_back(std::move(b));
  }
  return blocks;
}

bool HeatModel::validate() const {
  require(s >= 3, ErrorCode::InvalidArgument, "HeatModel: s must be >= 3");
  require(r > 0.0, ErrorCode::InvalidArgument, "HeatModel: r must be > 0");
  require(steps >= 1, ErrorCode::InvalidArgument,
          "HeatModel: steps per subwindow must be >= 1");
  if (r > 0.5) {
    std::cerr << "warning: heat model r = " << r
              << " > 1/2, step matrix spectrum leaves (-1, 1)\n";
    return false;
  }
  return true;
}

SparseSym heat_step_matrix(const HeatModel& model) {
  model.validate();
  const std::size_t s = model.s;
  std::vector<Triplet> up;
  for (std::size_t i = 1; i + 1 < s; ++i) {
    up.push_back({i, i, 1.0 - 2.0 * model.r});
    if (i + 2 < s) up.push_back({i, i + 1, model.r});
  }
  return SparseSym::from_upper(s, up);
}

HeatBlock::HeatBlock(const HeatModel& model)
    : step_(heat_step_matrix(model)), steps_(model.steps) {}

void HeatBlock::apply(const Vec& x, Vec& y) const {
  require_dim(x.size(), dim(), "HeatBlock::apply");
  Vec t = x;
  for (std::size_t k = 0; k < steps_; ++k) {
    step_.multiply(t, y);
    t.swap(y);
  }
  y = std::move(t);
}

void HeatBlock::apply_transpose(const Vec& x, Vec& y) const { apply(x, y); }

}  // namespace wc4dvar
