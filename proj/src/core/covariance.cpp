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

#include "wc4dvar/covariance.hpp"

#include <algorithm>
#include <numeric>

#include "wc4dvar/eigensolve.hpp"

namespace wc4dvar {

void SoarSpec::validate() const {
  require(lengthscale > 0.0, ErrorCode::InvalidArgument,
          "SOAR: lengthscale must be > 0");
  require(maxval >= 1, ErrorCode::InvalidArgument, "SOAR: maxval must be >= 1");
  require(sigma > 0.0, ErrorCode::InvalidArgument, "SOAR: sigma must be > 0");
  require(s >= 1, ErrorCode::InvalidArgument, "SOAR: dimension must be >= 1");
}

double soar_row(const SoarSpec& spec, std::ptrdiff_t i) {
  const auto n = static_cast<std::ptrdiff_t>(spec.s);
  std::ptrdiff_t d = ((i % n) + n) % n;
  d = std::min(d, n - d);
  if (d >= static_cast<std::ptrdiff_t>(spec.maxval)) return 0.0;
  const double theta = M_PI / static_cast<double>(spec.maxval);
  const double x =
      2.0 * std::abs(std::sin(static_cast<double>(d) * theta / 2.0)) /
      spec.lengthscale;
  return spec.sigma * (1.0 + x * std::exp(-x));
}

Vec circulant_eigenvalues(const SoarSpec& spec) {
  spec.validate();
  const std::size_t n = spec.s;
  Vec row(n);
  for (std::size_t j = 0; j < n; ++j)
    row[j] = soar_row(spec, static_cast<std::ptrdiff_t>(j));
  Vec lam(n);
  for (std::size_t k = 0; k < n; ++k) {
    double acc = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      if (row[j] == 0.0) continue;
      const auto jk = (j * k) % n;
      acc += row[j] * std::cos(2.0 * M_PI * static_cast<double>(jk) /
                               static_cast<double>(n));
    }
    lam[k] = acc;
  }
  return lam;
}

SparseSym build_circulant_spd(const SoarSpec& spec, Rng& rng,
                              CirculantInfo* info) {
  spec.validate();
  const std::size_t n = spec.s;
  std::vector<Triplet> up;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j) {
      const double v = soar_row(spec, static_cast<std::ptrdiff_t>(j - i));
      if (v != 0.0 || i == j) up.push_back({i, j, v});
    }
  SparseSym c = SparseSym::from_upper(n, up);
  const Vec lam = circulant_eigenvalues(spec);
  const double lmin = *std::min_element(lam.begin(), lam.end());
  const double psi = rng.uniform(0.0, 0.5);
  double delta = 0.0;
  if (lmin < 0.0) {
    delta = std::abs(lmin) + psi;
    c = c.shifted(delta);
  }
  if (info) *info = {lmin, delta};
  return c;
}

std::size_t BlockRSpec::p() const {
  return std::accumulate(pvec.begin(), pvec.end(), std::size_t{0});
}

void BlockRSpec::validate() const {
  require(!pvec.empty(), ErrorCode::InvalidArgument, "BlockR: empty pvec");
  for (auto b : pvec)
    require(b > 0, ErrorCode::InvalidArgument, "BlockR: zero block size");
  const std::size_t plen = pvec.size();
  require(pcorr.size() == plen * (plen - 1) / 2, ErrorCode::InvalidArgument,
          "BlockR: pcorr must have plen(plen-1)/2 entries");
  for (double c : pcorr)
    require(c >= 0.0, ErrorCode::InvalidArgument, "BlockR: negative pcorr");
  require(density > 0.0 && density <= 1.0, ErrorCode::InvalidArgument,
          "BlockR: density must lie in (0, 1]");
  require(floor > 0.0, ErrorCode::InvalidArgument, "BlockR: floor must be > 0");
}

std::vector<std::size_t> default_pvec(std::size_t p, std::size_t block) {
  require(p > 0 && block > 0, ErrorCode::InvalidArgument,
          "default_pvec: p and block must be > 0");
  std::vector<std::size_t> v(p / block, block);
  const std::size_t rem = p % block;
  if (rem) {
    if (v.empty() || rem * 2 >= block)
      v.push_back(rem);
    else
      v.back() += rem;
  }
  return v;
}

std::size_t pcorr_index(std::size_t plen, std::size_t a, std::size_t b) {
  // rows a = 0..plen-2, entries b = a+1..plen-1
  return a * plen - a * (a + 1) / 2 + (b - a - 1);
}

std::vector<double> default_pcorr(std::size_t plen, double base, double decay,
                                  Rng& rng, std::size_t groups, double cross) {
  require(groups >= 1, ErrorCode::InvalidArgument, "default_pcorr: groups must be >= 1");
  const std::size_t g = std::min(groups, std::max<std::size_t>(plen, 1));
  const auto group = [&](std::size_t a) { return a * g / plen; };
  std::vector<double> c(plen * (plen > 0 ? plen - 1 : 0) / 2);
  for (std::size_t a = 0; a < plen; ++a)
    for (std::size_t b = a + 1; b < plen; ++b) {
      const double u = rng.uniform();
      const double scale = group(a) == group(b) ? 0.5 + 0.5 * u : cross * u;
      c[pcorr_index(plen, a, b)] =
          base * scale * std::pow(decay, static_cast<double>(b - a - 1));
    }
  return c;
}

SparseSym build_block_R(const BlockRSpec& spec, Rng& rng, BlockRInfo* info) {
  spec.validate();
  const std::size_t plen = spec.pvec.size();
  const std::size_t p = spec.p();
  std::vector<std::size_t> off(plen + 1, 0);
  for (std::size_t b = 0; b < plen; ++b) off[b + 1] = off[b] + spec.pvec[b];

  std::vector<Triplet> up;
  for (std::size_t a = 0; a < plen; ++a) {
    SoarSpec ss = spec.soar;
    ss.s = spec.pvec[a];
    for (std::size_t i = 0; i < spec.pvec[a]; ++i)
      for (std::size_t j = i; j < spec.pvec[a]; ++j) {
        if (rng.uniform() >= spec.density) continue;
        const double v =
            rng.uniform() * soar_row(ss, static_cast<std::ptrdiff_t>(j - i));
        if (v == 0.0) continue;
        // T + T^T doubles the diagonal
        up.push_back({off[a] + i, off[a] + j, i == j ? 2.0 * v : v});
      }
    for (std::size_t b = a + 1; b < plen; ++b) {
      const double pc = spec.pcorr[pcorr_index(plen, a, b)];
      for (std::size_t i = 0; i < spec.pvec[a]; ++i)
        for (std::size_t j = 0; j < spec.pvec[b]; ++j) {
          if (rng.uniform() >= spec.density) continue;
          const double v = rng.uniform() * pc;
          if (v == 0.0) continue;
          up.push_back({off[a] + i, off[b] + j, v});
        }
    }
  }
  SparseSym r = SparseSym::from_upper(p, up);
  const double lmin = sym_eig_extremes(r, EigWhich::Smallest).values[0];
  double shift = 0.0;
  if (lmin < spec.floor_threshold) {
    shift = spec.floor - lmin;
    r = r.shifted(shift);
  }
  if (info) *info = {lmin, shift};
  return r;
}

ObsOperator build_obs_operator(std::size_t s, std::size_t p, Rng& rng,
                               bool smoothing, std::size_t n_times) {
  require(p >= 1, ErrorCode::InvalidArgument, "build_obs_operator: p must be >= 1");
  require(p <= s, ErrorCode::InvalidArgument, "build_obs_operator: p > s");
  const std::size_t lo = smoothing ? 2 : 0;
  const std::size_t hi = smoothing ? (s >= 2 ? s - 2 : 0) : s;  // exclusive
  require(hi > lo && p <= hi - lo, ErrorCode::InvalidArgument,
          "build_obs_operator: not enough interior columns for smoothed rows");
  std::vector<std::size_t> cand(hi - lo);
  std::iota(cand.begin(), cand.end(), lo);
  for (std::size_t i = 0; i < p; ++i) {
    const std::size_t j = i + rng.index(cand.size() - i);
    std::swap(cand[i], cand[j]);
  }
  std::vector<std::size_t> obs(cand.begin(), cand.begin() + static_cast<std::ptrdiff_t>(p));
  std::sort(obs.begin(), obs.end());

  ObsOperator h;
  h.observed = obs;
  h.smoothed.assign(p, false);
  h.n_times = n_times;
  std::vector<Triplet> e;
  for (std::size_t r = 0; r < p; ++r) {
    if (smoothing && (r % 2 == 1)) {
      h.smoothed[r] = true;
      for (std::size_t c = obs[r] - 2; c <= obs[r] + 2; ++c)
        e.push_back({r, c, 0.2});
    } else {
      e.push_back({r, obs[r], 1.0});
    }
  }
  h.hi = CsrMatrix(p, s, std::move(e));
  return h;
}

CovarianceSet CovarianceSet::make_D(SparseSym b, SparseSym q, std::size_t n_q) {
  require(b.dim() == q.dim(), ErrorCode::Dimension,
          "make_D: B and Q must have the same dimension");
  CovarianceSet c;
  c.distinct_.push_back(std::make_shared<const SparseSym>(std::move(b)));
  c.distinct_.push_back(std::make_shared<const SparseSym>(std::move(q)));
  c.slot_.assign(n_q + 1, 1);
  c.slot_[0] = 0;
  return c;
}

CovarianceSet CovarianceSet::make_R(SparseSym ri, std::size_t n_blocks) {
  CovarianceSet c;
  c.distinct_.push_back(std::make_shared<const SparseSym>(std::move(ri)));
  c.slot_.assign(n_blocks, 0);
  return c;
}

void CovarianceSet::multiply(const Vec& x, Vec& y,
                             std::uint64_t* counter) const {
  require_dim(x.size(), dim(), "CovarianceSet::multiply");
  const std::size_t n = block_dim();
  y.assign(dim(), 0.0);
  Vec xb(n), yb;
  for (std::size_t t = 0; t < n_blocks(); ++t) {
    std::copy_n(x.begin() + static_cast<std::ptrdiff_t>(t * n), n, xb.begin());
    block(t).multiply(xb, yb);
    std::copy(yb.begin(), yb.end(), y.begin() + static_cast<std::ptrdiff_t>(t * n));
  }
  if (counter) *counter += n_blocks();
}

Eigen::MatrixXd CovarianceSet::to_dense() const {
  const auto n = static_cast<Eigen::Index>(block_dim());
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(dim(), dim());
  for (std::size_t t = 0; t < n_blocks(); ++t)
    a.block(static_cast<Eigen::Index>(t) * n, static_cast<Eigen::Index>(t) * n,
            n, n) = block(t).to_dense();
  return a;
}

}  // namespace wc4dvar
