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

#include "wc4dvar/spectra.hpp"

#include <algorithm>
#include <tuple>

namespace wc4dvar {

IntervalUnion saddle_intervals(const SpectralSummary& s) {
  const double lp = std::min(s.lD, s.lR);
  const double Lp = std::max(s.LD, s.LR);
  const double big = Lp * s.LS * s.LL * s.kappaD;
  const double small = lp * s.lS * s.lL / s.kappaD;
  IntervalUnion u;
  u.negative = {(lp - std::sqrt(lp * lp + 4.0 * big)) / 2.0,
                (Lp - std::sqrt(Lp * Lp + 4.0 * small)) / 2.0};
  u.middle = {lp, Lp};
  u.positive = {(lp + std::sqrt(lp * lp + 4.0 * small)) / 2.0,
                (Lp + std::sqrt(Lp * Lp + 4.0 * big)) / 2.0};
  return u;
}

std::size_t unit_eigenvalue_count(std::size_t n, std::size_t k, std::size_t s) {
  require(k >= 2, ErrorCode::InvalidArgument,
          "unit_eigenvalue_count: k must be >= 2");
  const std::size_t f = n / k;
  require(n + 1 >= 2 * f, ErrorCode::InvalidArgument,
          "unit_eigenvalue_count: k too small for N");
  return (n + 1 - 2 * f) * s;
}

double lm_upper_bound(double k) { return k + 1.0 + 2.0 * std::sqrt(k); }
double lm_tight_bound(double k) { return 1.0 + k + std::sqrt(k); }
double lm_k4_bound() { return 5.0 + std::sqrt(8.0); }

std::pair<double, double> lm_k3_extremes(double mu, std::size_t n,
                                             std::size_t k) {
  require(k == 3 && n >= 3 && n <= 5, ErrorCode::InvalidArgument,
          "lm_k3_extremes: only defined for k = 3 and N in {3, 4, 5}");
  const double m2 = mu * mu;
  const double sig = m2 + m2 * m2 + m2 * m2 * m2;
  const double root = std::sqrt(sig * sig + 4.0 * sig);
  return {1.0 + 0.5 * (sig - root), 1.0 + 0.5 * (sig + root)};
}

double applicable_upper_bound(std::size_t n, std::size_t k) {
  const double kk = static_cast<double>(k);
  const std::size_t n1 = n + 1;
  double b = lm_upper_bound(kk);
  if (k < n1 && n1 <= 2 * k) b = std::min(b, lm_tight_bound(kk));
  if (k == 4 && n1 >= 9 && n1 <= 12) b = std::min(b, lm_k4_bound());
  if (k == 3 && n >= 3 && n <= 5) b = std::min(b, lm_k3_extremes(1.0).second);
  return b;
}

Eigen::MatrixXd reduced_A_mu(double mu, std::size_t n, std::size_t k) {
  require(k >= 1, ErrorCode::InvalidArgument, "reduced_A_mu: k must be >= 1");
  const std::size_t chains = n / k;
  const std::size_t dim = k * chains + 1;
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(dim, dim);
  // 1-based block indices; row nk+1 of F holds mu^{nk-j+1} on chain n
  for (std::size_t c = 1; c <= chains; ++c) {
    const std::size_t lo = (c - 1) * k + 1, hi = c * k, row = c * k + 1;
    for (std::size_t i = lo; i <= hi; ++i) {
      const double fi = std::pow(mu, static_cast<double>(hi - i + 1));
      a(row - 1, i - 1) -= fi;
      a(i - 1, row - 1) -= fi;
      for (std::size_t j = lo; j <= hi; ++j)
        a(i - 1, j - 1) += fi * std::pow(mu, static_cast<double>(hi - j + 1));
    }
  }
  return a;
}

namespace {

// X = L * Lhat^{-1}, dense.
Eigen::MatrixXd right_preconditioned(const BlockBandedOperator& l,
                                     const BlockBandedOperator& lhat) {
  const Eigen::MatrixXd ld = l.to_dense();
  const Eigen::MatrixXd lh = lhat.to_dense();
  // X lh = ld  <=>  lh^T X^T = ld^T
  Eigen::MatrixXd xt =
      lh.transpose().triangularView<Eigen::Upper>().solve(ld.transpose());
  return xt.transpose();
}

Vec to_vec(const Eigen::VectorXd& v) { return Vec(v.data(), v.data() + v.size()); }

std::pair<double, double> gen_extremes(const Eigen::MatrixXd& a,
                                       const Eigen::MatrixXd& b) {
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(
      a, b, Eigen::ComputeEigenvectors | Eigen::Ax_lBx);
  require(es.info() == Eigen::Success, ErrorCode::Numerical,
          "generalized eigensolve failed");
  const auto& v = es.eigenvalues();
  return {v.minCoeff(), v.maxCoeff()};
}

}  // namespace

Vec preconditioned_model_spectrum(const BlockBandedOperator& l,
                                  const BlockBandedOperator& lhat) {
  require(l.dim() == lhat.dim(), ErrorCode::Dimension,
          "preconditioned_model_spectrum: dimension mismatch");
  const Eigen::MatrixXd x = right_preconditioned(l, lhat);
  const Eigen::MatrixXd g = x.transpose() * x;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (g + g.transpose()),
                                                    Eigen::EigenvaluesOnly);
  return to_vec(es.eigenvalues());
}

std::pair<double, double> preconditioned_model_extremes(
    const BlockBandedOperator& l, const BlockBandedOperator& lhat,
    const EigOptions& opt) {
  LinearMap op = [&](const Vec& x, Vec& y) {
    Vec a, b;
    lhat.apply_inverse(x, a);
    l.apply(a, b);
    l.apply_transpose(b, a);
    lhat.apply_inverse_transpose(a, y);
  };
  const auto lo = sym_eig_extremes(op, l.dim(), EigWhich::Smallest, 1, opt);
  const auto hi = sym_eig_extremes(op, l.dim(), EigWhich::Largest, 1, opt);
  return {lo.values[0], hi.values[0]};
}

Vec model_gram_spectrum(const BlockBandedOperator& l) {
  const Eigen::MatrixXd ld = l.to_dense();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(ld.transpose() * ld,
                                                    Eigen::EigenvaluesOnly);
  return to_vec(es.eigenvalues());
}

SpectralSummary spectral_summary(const SaddleOperator& op,
                                 const SaddlePreconditioner& pc,
                                 std::size_t max_dense) {
  require(op.dim() <= max_dense, ErrorCode::InvalidArgument,
          "spectral_summary: problem too large for dense oracles; use the "
          "extremes mode");
  require(pc.shape() == PrecondShape::BlockDiag, ErrorCode::InvalidArgument,
          "spectral_summary: needs the block diagonal preconditioner");
  const auto ns = static_cast<Eigen::Index>(op.s() * op.n_times());
  const auto np = static_cast<Eigen::Index>(op.p() * op.n_times());
  const Eigen::MatrixXd pd = pc.dense();
  const Eigen::MatrixXd d = op.D().to_dense();
  const Eigen::MatrixXd r = op.R().to_dense();
  const Eigen::MatrixXd l = op.L().to_dense();
  const Eigen::MatrixXd h = op.H_dense();
  const Eigen::MatrixXd lh = pc.lhat().to_dense();

  SpectralSummary s;
  std::tie(s.lD, s.LD) = gen_extremes(d, pd.block(0, 0, ns, ns));
  std::tie(s.lR, s.LR) = gen_extremes(r, pd.block(ns, ns, np, np));
  const Eigen::MatrixXd st = l.transpose() * d.llt().solve(l);
  const Eigen::MatrixXd sf = st + h.transpose() * r.llt().solve(h);
  std::tie(s.lS, s.LS) = gen_extremes(0.5 * (sf + sf.transpose()),
                                      0.5 * (st + st.transpose()));
  std::tie(s.lL, s.LL) =
      gen_extremes(l.transpose() * l, lh.transpose() * lh);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> de(d, Eigen::EigenvaluesOnly);
  s.kappaD = de.eigenvalues().maxCoeff() / de.eigenvalues().minCoeff();
  return s;
}

Vec preconditioned_saddle_spectrum(const SaddleOperator& op,
                                   const SaddlePreconditioner& pc,
                                   std::size_t max_dense) {
  require(op.dim() <= max_dense, ErrorCode::InvalidArgument,
          "preconditioned_saddle_spectrum: problem too large for dense mode");
  const Eigen::MatrixXd a = op.to_dense();
  const Eigen::MatrixXd p = pc.dense();
  if (pc.shape() == PrecondShape::BlockDiag) {
    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(
        a, 0.5 * (p + p.transpose()), Eigen::EigenvaluesOnly | Eigen::Ax_lBx);
    require(es.info() == Eigen::Success, ErrorCode::Numerical,
            "preconditioned_saddle_spectrum: eigensolve failed");
    return to_vec(es.eigenvalues());
  }
  Eigen::MatrixXd m = p.partialPivLu().solve(a);
  Eigen::EigenSolver<Eigen::MatrixXd> es(m, false);
  Vec v(static_cast<std::size_t>(m.rows()));
  for (Eigen::Index i = 0; i < m.rows(); ++i) v[i] = es.eigenvalues()(i).real();
  std::sort(v.begin(), v.end());
  return v;
}

std::size_t count_unit(const Vec& values, double tol) {
  return static_cast<std::size_t>(std::count_if(
      values.begin(), values.end(),
      [tol](double v) { return std::abs(v - 1.0) <= tol; }));
}

}  // namespace wc4dvar
