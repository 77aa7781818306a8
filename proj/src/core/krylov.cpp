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

#include "wc4dvar/krylov.hpp"

#include <algorithm>
#include <chrono>
#include <limits>

namespace wc4dvar {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

}  // namespace

Vec minres(const LinearMap& a, const LinearMap& pinv, const Vec& b,
           const KrylovOptions& opt, SolveReport& rep) {
  const auto t0 = Clock::now();
  const std::size_t n = b.size();
  rep = SolveReport{};
  const double bnorm = norm2(b);
  require(bnorm > 0.0, ErrorCode::InvalidArgument, "minres: zero right-hand side");

  Vec x(n, 0.0), y, av;
  // explicit initial residual r = b - A x0
  a(x, av);
  ++rep.a_applications;
  Vec r1(n);
  for (std::size_t i = 0; i < n; ++i) r1[i] = b[i] - av[i];
  Vec r = r1;  // true residual, tracked by recurrence

  pinv(r1, y);
  ++rep.p_applications;
  double beta1 = dot(r1, y);
  if (beta1 < 0.0)
    throw Error(ErrorCode::Numerical,
                "minres: " + opt.precond_label + " is not positive definite");
  beta1 = std::sqrt(beta1);
  if (beta1 == 0.0) {
    rep.converged = true;
    rep.wall_seconds = seconds_since(t0);
    return x;
  }

  double oldb = 0.0, beta = beta1, dbar = 0.0, epsln = 0.0, phibar = beta1;
  double cs = -1.0, sn = 0.0;
  Vec w(n, 0.0), w1(n, 0.0), w2(n, 0.0);
  Vec aw(n, 0.0), aw1(n, 0.0), aw2(n, 0.0);
  Vec r2 = r1, v(n);

  for (std::size_t itn = 1; itn <= opt.maxit; ++itn) {
    const double sc = 1.0 / beta;
    for (std::size_t i = 0; i < n; ++i) v[i] = sc * y[i];
    a(v, av);
    ++rep.a_applications;
    y = av;
    if (itn >= 2) axpy(-beta / oldb, r1, y);
    const double alfa = dot(v, y);
    axpy(-alfa / beta, r2, y);
    r1.swap(r2);
    r2 = y;
    pinv(r2, y);
    ++rep.p_applications;
    oldb = beta;
    beta = dot(r2, y);
    if (beta < 0.0)
      throw Error(ErrorCode::Numerical,
                  "minres: " + opt.precond_label + " is not positive definite");
    beta = std::sqrt(beta);

    const double oldeps = epsln;
    const double delta = cs * dbar + sn * alfa;
    const double gbar = sn * dbar - cs * alfa;
    epsln = sn * beta;
    dbar = -cs * beta;
    double gamma = std::hypot(gbar, beta);
    gamma = std::max(gamma, std::numeric_limits<double>::epsilon());
    cs = gbar / gamma;
    sn = beta / gamma;
    const double phi = cs * phibar;
    phibar = sn * phibar;

    const double denom = 1.0 / gamma;
    w1.swap(w2);
    w2.swap(w);
    aw1.swap(aw2);
    aw2.swap(aw);
    for (std::size_t i = 0; i < n; ++i) {
      w[i] = (v[i] - oldeps * w1[i] - delta * w2[i]) * denom;
      aw[i] = (av[i] - oldeps * aw1[i] - delta * aw2[i]) * denom;
    }
    axpy(phi, w, x);
    axpy(-phi, aw, r);

    if (opt.residual_refresh && itn % opt.residual_refresh == 0) {
      Vec ax;
      a(x, ax);
      ++rep.a_applications;
      for (std::size_t i = 0; i < n; ++i) r[i] = b[i] - ax[i];
    }

    const double rel = norm2(r) / bnorm;
    rep.iterations = itn;
    rep.relres_history.push_back(rel);
    rep.precond_history.push_back(phibar);
    rep.final_relres = rel;
    const bool breakdown = beta <= 1e-14 * beta1;
    if (rel <= opt.tol || breakdown) {
      rep.converged = true;
      break;
    }
  }
  rep.wall_seconds = seconds_since(t0);
  return x;
}

Vec gmres(const LinearMap& a, const LinearMap& pinv, const Vec& b,
          const KrylovOptions& opt, SolveReport& rep) {
  const auto t0 = Clock::now();
  const std::size_t n = b.size();
  rep = SolveReport{};
  const double bnorm = norm2(b);
  require(bnorm > 0.0, ErrorCode::InvalidArgument, "gmres: zero right-hand side");

  const std::size_t m = opt.maxit;
  std::vector<Vec> vb, zb;
  vb.reserve(std::min<std::size_t>(m + 1, 1024));
  zb.reserve(std::min<std::size_t>(m, 1024));
  std::vector<std::vector<double>> h;  // column j holds H(0..j+1, j)
  std::vector<double> cs, sn, g{bnorm};
  Vec v0 = b;
  for (auto& e : v0) e /= bnorm;
  vb.push_back(std::move(v0));

  Vec z, w;
  std::size_t k = 0;
  for (std::size_t j = 0; j < m; ++j) {
    pinv(vb[j], z);
    ++rep.p_applications;
    a(z, w);
    ++rep.a_applications;
    zb.push_back(z);

    std::vector<double> col(j + 2, 0.0);
    const double wn0 = norm2(w);
    for (std::size_t i = 0; i <= j; ++i) {
      col[i] = dot(w, vb[i]);
      axpy(-col[i], vb[i], w);
    }
    double wn = norm2(w);
    if (wn < 0.7 * wn0) {
      for (std::size_t i = 0; i <= j; ++i) {
        const double c = dot(w, vb[i]);
        col[i] += c;
        axpy(-c, vb[i], w);
      }
      wn = norm2(w);
    }
    col[j + 1] = wn;

    for (std::size_t i = 0; i < j; ++i) {
      const double t = cs[i] * col[i] + sn[i] * col[i + 1];
      col[i + 1] = -sn[i] * col[i] + cs[i] * col[i + 1];
      col[i] = t;
    }
    const double den = std::hypot(col[j], col[j + 1]);
    const double c = den == 0.0 ? 1.0 : col[j] / den;
    const double s = den == 0.0 ? 0.0 : col[j + 1] / den;
    cs.push_back(c);
    sn.push_back(s);
    col[j] = den;
    col[j + 1] = 0.0;
    g.push_back(-s * g[j]);
    g[j] = c * g[j];
    h.push_back(std::move(col));
    k = j + 1;

    const double rel = std::abs(g[j + 1]) / bnorm;
    rep.iterations = k;
    rep.relres_history.push_back(rel);
    rep.final_relres = rel;
    const bool happy = wn <= 1e-14 * wn0 || wn == 0.0;
    if (rel <= opt.tol || happy) {
      rep.converged = true;
      break;
    }
    for (auto& e : w) e /= wn;
    vb.push_back(w);
  }

  // back substitution on the k x k triangle
  std::vector<double> yk(k, 0.0);
  for (std::size_t i = k; i-- > 0;) {
    double s = g[i];
    for (std::size_t jj = i + 1; jj < k; ++jj) s -= h[jj][i] * yk[jj];
    yk[i] = s / h[i][i];
  }
  Vec x(n, 0.0);
  for (std::size_t i = 0; i < k; ++i) axpy(yk[i], zb[i], x);
  rep.wall_seconds = seconds_since(t0);
  return x;
}

}  // namespace wc4dvar
