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

#include "wc4dvar/harness.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>

namespace wc4dvar {

std::string fmt_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

LFlavor parse_lflavor(const std::string& s) {
  if (s == "L0") return LFlavor::L0;
  if (s == "LI") return LFlavor::LI;
  if (s == "LM") return LFlavor::LM;
  if (s == "L" || s == "exact") return LFlavor::Exact;
  throw Error(ErrorCode::Parse, "unknown L_hat flavor '" + s + "'");
}

RHatKind parse_rhat(const std::string& s) {
  if (s == "diag") return RHatKind::Diag;
  if (s == "block") return RHatKind::Block;
  if (s == "rr") return RHatKind::RR;
  if (s == "me") return RHatKind::ME;
  if (s == "exact") return RHatKind::Exact;
  throw Error(ErrorCode::Parse, "unknown R_hat variant '" + s + "'");
}

PrecondShape parse_shape(const std::string& s) {
  if (s == "PD") return PrecondShape::BlockDiag;
  if (s == "PI") return PrecondShape::InexactConstraint;
  throw Error(ErrorCode::Parse, "unknown preconditioner shape '" + s + "'");
}

namespace {

SoarSpec soar_from(const Config& c, const std::string& prefix, std::size_t s) {
  return {c.real(prefix + "_lengthscale"), c.size(prefix + "_maxval"),
          c.real(prefix + "_sigma"), s};
}

}  // namespace

Problem::Problem(const Config& cfg) : cfg_(cfg) {
  cfg_.validate();
  const std::size_t s = cfg_.size("s"), p = cfg_.size("p"), n = cfg_.size("N");
  Rng rng(cfg_.u64("seed"));

  if (cfg_.str("experiment") == "lorenz") {
    Lorenz96Model m{s, cfg_.real("forcing"), cfg_.real("dt"),
                    cfg_.size("steps_per_subwindow")};
    models_ = lorenz_tlm_blocks(m, n, cfg_.size("spinup_steps"));
  } else {
    HeatModel hm{s, cfg_.real("heat_r"), cfg_.size("steps_per_subwindow")};
    auto blk = std::make_shared<HeatBlock>(hm);
    models_.assign(n, blk);
  }

  SparseSym b, q;
  if (cfg_.str("d_model") == "identity") {
    b = SparseSym::identity(s);
    q = SparseSym::identity(s);
  } else {
    b = build_circulant_spd(soar_from(cfg_, "b", s), rng);
    q = build_circulant_spd(soar_from(cfg_, "q", s), rng);
  }

  pvec_ = default_pvec(p, cfg_.size("r_block_size"));
  BlockRSpec rs;
  rs.pvec = pvec_;
  rs.pcorr = default_pcorr(pvec_.size(), cfg_.real("r_pcorr"),
                           cfg_.real("r_pcorr_decay"), rng,
                           cfg_.size("r_instruments"), cfg_.real("r_pcorr_cross"));
  rs.density = cfg_.real("r_density");
  rs.floor = cfg_.real("r_floor");
  rs.floor_threshold = cfg_.real("r_floor_threshold");
  rs.soar = soar_from(cfg_, "r_soar", 0);
  ri_ = build_block_R(rs, rng, &rinfo_);

  ObsOperator h = build_obs_operator(s, p, rng, cfg_.flag("h_smoothing"), n + 1);

  op_ = std::make_unique<SaddleOperator>(
      CovarianceSet::make_D(std::move(b), std::move(q), n),
      CovarianceSet::make_R(ri_, n + 1), std::move(h),
      BlockBandedOperator::exact(models_));

  rhs_.assign(op_->dim(), 0.0);
  const std::size_t first = (s + p) * (n + 1);
  for (std::size_t i = 0; i < first; ++i) rhs_[i] = rng.normal();
}

std::shared_ptr<const RHat> Problem::rhat(RHatKind kind) {
  auto it = rhat_cache_.find(kind);
  if (it != rhat_cache_.end()) return it->second;
  std::shared_ptr<const RHat> r;
  switch (kind) {
    case RHatKind::Diag:
      r = std::make_shared<RHat>(RHat::make_diag(ri_));
      break;
    case RHatKind::Block: {
      BlockOptions bo;
      bo.tol = cfg_.real_or_auto("block_tol");
      if (!cfg_.str("block_maxsize").empty()) bo.maxsize = cfg_.size("block_maxsize");
      if (!cfg_.str("block_numproc").empty()) bo.numproc = cfg_.size("block_numproc");
      r = std::make_shared<RHat>(RHat::make_block(ri_, pvec_, bo));
      break;
    }
    case RHatKind::RR: {
      const auto g = cfg_.real_or_auto("rr_gamma");
      r = std::make_shared<RHat>(RHat::make_rr(ri_, g ? *g : auto_gamma(ri_)));
      break;
    }
    case RHatKind::ME: {
      const auto t = cfg_.real_or_auto("me_threshold");
      r = std::make_shared<RHat>(RHat::make_me(ri_, t ? *t : auto_threshold(ri_)));
      break;
    }
    case RHatKind::Exact:
      r = std::make_shared<RHat>(RHat::make_exact(ri_));
      break;
  }
  rhat_cache_[kind] = r;
  return r;
}

std::shared_ptr<const DHat> Problem::dhat() {
  if (!dhat_) {
    const auto mode = cfg_.str("dhat") == "exact" ? DHat::Mode::Exact
                                                  : DHat::Mode::RidgeIchol;
    dhat_ = std::make_shared<DHat>(op_->D(), mode, cfg_.real("dhat_delta"));
  }
  return dhat_;
}

BlockBandedOperator Problem::lhat(LFlavor flavor, std::size_t k) const {
  const std::size_t s = op_->s(), n = models_.size();
  switch (flavor) {
    case LFlavor::L0: return BlockBandedOperator::l0(s, n);
    case LFlavor::LI: return BlockBandedOperator::li(s, n);
    case LFlavor::LM: return BlockBandedOperator::lm(models_, k);
    case LFlavor::Exact: return BlockBandedOperator::exact(models_);
  }
  throw Error(ErrorCode::Internal, "unreachable L_hat flavor");
}

SaddlePreconditioner Problem::preconditioner(PrecondShape shape, LFlavor flavor,
                                             std::size_t k, RHatKind rkind) {
  return SaddlePreconditioner(
      *op_, shape, lhat(flavor, k), rhat(rkind),
      shape == PrecondShape::BlockDiag ? dhat() : nullptr);
}

Vec Problem::solve(const SaddlePreconditioner& pc, SolveReport& report) const {
  KrylovOptions ko;
  ko.tol = cfg_.real("tol");
  ko.maxit = cfg_.size("maxit");
  ko.residual_refresh = cfg_.size("minres_refresh");
  ko.precond_label = to_string(pc.shape()) + "(" + to_string(pc.lhat().flavor()) +
                     ", " + to_string(pc.rhat().kind()) + ")";
  LinearMap a = [this](const Vec& x, Vec& y) { op_->apply(x, y); };
  LinearMap m = [&pc](const Vec& x, Vec& y) { pc.apply_inverse(x, y); };
  op_->counters().reset();
  Vec x = pc.shape() == PrecondShape::BlockDiag ? minres(a, m, rhs_, ko, report)
                                                : gmres(a, m, rhs_, ko, report);
  report.counters = op_->counters();
  return x;
}

std::vector<RunRecord> run_grid(
    const Config& cfg, const std::function<void(const RunRecord&)>& on_record) {
  Problem prob(cfg);
  const std::uint64_t fp = cfg.fingerprint();
  std::vector<RunRecord> out;
  for (const auto& sh : cfg.list("shapes")) {
    const PrecondShape shape = parse_shape(sh);
    for (const auto& lf : cfg.list("lhat")) {
      const LFlavor flavor = parse_lflavor(lf);
      std::vector<std::size_t> ks{0};
      if (flavor == LFlavor::LM) ks = cfg.size_list("k");
      for (std::size_t k : ks)
        for (const auto& rk : cfg.list("rhat")) {
          RunRecord rec;
          rec.model = cfg.str("experiment");
          rec.s = cfg.size("s");
          rec.p = cfg.size("p");
          rec.n = cfg.size("N");
          rec.shape = shape;
          rec.lhat = flavor;
          rec.k = k;
          rec.rhat = parse_rhat(rk);
          rec.solver = shape == PrecondShape::BlockDiag ? "minres" : "gmres";
          rec.fingerprint = fp;
          try {
            SaddlePreconditioner pc = prob.preconditioner(shape, flavor, k, rec.rhat);
            prob.solve(pc, rec.report);
          } catch (const Error& e) {
            rec.error = e.what();
          }
          if (on_record) on_record(rec);
          out.push_back(std::move(rec));
        }
    }
  }
  return out;
}

std::string experiment_csv_header() {
  return "model,s,p,N,shape,lhat,k,rhat,solver,iterations,converged,"
         "final_relres,wallclock_s,count_R,count_Rhat_inv,count_D,"
         "count_Dhat_inv,count_M,count_Mt,count_H,count_Ht,count_A,count_Pinv,"
         "count_L,count_Lt,count_Lhat_inv,count_Lhat_inv_t,fingerprint,error";
}

std::string experiment_csv_row(const RunRecord& r) {
  const auto& c = r.report.counters;
  char fp[32];
  std::snprintf(fp, sizeof fp, "%016llx",
                static_cast<unsigned long long>(r.fingerprint));
  std::string err = r.error;
  std::replace(err.begin(), err.end(), ',', ';');
  std::replace(err.begin(), err.end(), '\n', ' ');
  std::string row = r.model + "," + std::to_string(r.s) + "," +
                    std::to_string(r.p) + "," + std::to_string(r.n) + "," +
                    to_string(r.shape) + "," + to_string(r.lhat) + "," +
                    (r.lhat == LFlavor::LM ? std::to_string(r.k) : "") + "," +
                    to_string(r.rhat) + "," + r.solver + "," +
                    std::to_string(r.report.iterations) + "," +
                    (r.report.converged ? "1" : "0") + "," +
                    fmt_double(r.report.final_relres) + "," +
                    fmt_double(r.report.wall_seconds);
  for (std::uint64_t v : {c.r, c.rhat_inv, c.d, c.dhat_inv, c.m, c.mt, c.h, c.ht,
                          c.a, c.pinv, c.l, c.lt, c.lhat_inv, c.lhat_inv_t})
    row += "," + std::to_string(v);
  row += std::string(",") + fp + "," + err;
  return row;
}

namespace {

std::ofstream open_out(const std::string& dir, const std::string& name) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::Io, "cannot create directory '" + dir + "'");
  const auto path = std::filesystem::path(dir) / name;
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorCode::Io, "cannot write '" + path.string() + "'");
  return f;
}

std::string opt_size(const std::optional<std::size_t>& v) {
  return v ? std::to_string(*v) : "";
}

std::string opt_double(const std::optional<double>& v) {
  return v ? fmt_double(*v) : "";
}

}  // namespace

std::vector<RunRecord> run_experiment(const Config& cfg,
                                      const std::string& out_dir) {
  cfg.validate();
  auto f = open_out(out_dir, "experiment.csv");
  f << experiment_csv_header() << "\n";
  auto recs = run_grid(cfg, [&f](const RunRecord& r) {
    f << experiment_csv_row(r) << "\n";
    f.flush();
  });
  if (!f) throw Error(ErrorCode::Io, "failed writing experiment.csv");
  return recs;
}

std::vector<ModelSpectrumRow> model_spectrum_study(const Config& cfg) {
  const std::string model = cfg.str("spectra_model");
  require(model == "heat" || model == "lorenz", ErrorCode::InvalidArgument,
          "config: spectra_model must be 'heat' or 'lorenz'");
  const std::size_t s = cfg.size("spectra_s"), steps = cfg.size("spectra_steps");
  const std::size_t dense_limit = cfg.size("spectra_dense_limit");
  std::vector<ModelSpectrumRow> rows;

  double mu_max = 0.0;
  std::shared_ptr<const LinearBlock> heat;
  if (model == "heat") {
    HeatModel hm{s, cfg.real("spectra_heat_r"), steps};
    auto hb = std::make_shared<HeatBlock>(hm);
    const auto lo = sym_eig_extremes(hb->step_matrix(), EigWhich::Smallest);
    const auto hi = sym_eig_extremes(hb->step_matrix(), EigWhich::Largest);
    mu_max = std::pow(std::max(std::abs(lo.values[0]), std::abs(hi.values[0])),
                      static_cast<double>(steps));
    heat = hb;
  }
  for (std::size_t n1 : cfg.size_list("spectra_n1")) {
    require(n1 >= 2, ErrorCode::InvalidArgument, "config: spectra_n1 entries must be >= 2");
    const std::size_t n = n1 - 1;
    std::vector<BlockPtr> models;
    if (heat) {
      models.assign(n, heat);
    } else {
      Lorenz96Model lm{s, cfg.real("forcing"), cfg.real("dt"), steps};
      models = lorenz_tlm_blocks(lm, n, cfg.size("spinup_steps"));
      double worst = 0.0;
      for (const auto& m : models) {
        Eigen::MatrixXd md = m->to_dense();
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(md * md.transpose(),
                                                          Eigen::EigenvaluesOnly);
        worst = std::max(worst, std::sqrt(es.eigenvalues().maxCoeff()));
      }
      mu_max = worst;  // spectral norm of the model blocks
    }
    const auto l = BlockBandedOperator::exact(models);
    for (std::size_t k : cfg.size_list("spectra_k")) {
      require(k >= 1 && k <= n1, ErrorCode::InvalidArgument,
              "config: spectra_k entries must lie in [1, N+1]");
      const auto lm = BlockBandedOperator::lm(models, k);
      ModelSpectrumRow row;
      row.model = model;
      row.s = s;
      row.steps = steps;
      row.n1 = n1;
      row.k = k;
      row.mu_max = mu_max;
      if (k >= 2) row.unit_formula = unit_eigenvalue_count(n, k, s);
      if (l.dim() <= dense_limit) {
        row.mode = "dense";
        const Vec ev = preconditioned_model_spectrum(l, lm);
        row.min_eig = ev.front();
        row.max_eig = ev.back();
        row.unit_computed = count_unit(ev, 1e-8);
      } else {
        row.mode = "extremes";
        std::tie(row.min_eig, row.max_eig) = preconditioned_model_extremes(l, lm);
      }
      if (heat) {
        row.upper_bound = applicable_upper_bound(n, k);
        if (k == 3 && n >= 3 && n <= 5)
          row.closed_form_max = lm_k3_extremes(mu_max, n, k).second;
      }
      rows.push_back(row);
    }
  }
  return rows;
}

std::vector<IntervalRow> interval_study(const Config& cfg) {
  Config c = cfg;
  c.set("experiment", cfg.str("intervals_model"));
  c.set("s", cfg.str("intervals_s"));
  c.set("p", cfg.str("intervals_p"));
  c.set("N", cfg.str("intervals_N"));
  c.set("k", cfg.str("intervals_k"));
  c.set("d_model", "identity");
  c.set("dhat", "exact");
  Problem prob(c);
  std::vector<IntervalRow> rows;
  for (const auto& lf : cfg.list("intervals_lhat")) {
    const LFlavor flavor = parse_lflavor(lf);
    std::vector<std::size_t> ks{0};
    if (flavor == LFlavor::LM) ks = c.size_list("k");
    for (std::size_t k : ks)
      for (const auto& rk : cfg.list("intervals_rhat")) {
        IntervalRow row;
        row.model = c.str("experiment");
        row.s = c.size("s");
        row.p = c.size("p");
        row.n = c.size("N");
        row.lhat = flavor;
        row.k = k;
        row.rhat = parse_rhat(rk);
        auto pc = prob.preconditioner(PrecondShape::BlockDiag, flavor, k, row.rhat);
        row.summary = spectral_summary(prob.op(), pc);
        row.bounds = saddle_intervals(row.summary);
        const Vec ev = preconditioned_saddle_spectrum(prob.op(), pc);
        row.min_neg = row.max_neg = row.min_pos = row.max_pos = 0.0;
        bool any_neg = false, any_pos = false;
        for (double v : ev) {
          if (v < 0) {
            row.min_neg = any_neg ? std::min(row.min_neg, v) : v;
            row.max_neg = any_neg ? std::max(row.max_neg, v) : v;
            any_neg = true;
          } else {
            row.min_pos = any_pos ? std::min(row.min_pos, v) : v;
            row.max_pos = any_pos ? std::max(row.max_pos, v) : v;
            any_pos = true;
          }
          if (!row.bounds.contains(v, 1e-8)) ++row.outside;
        }
        rows.push_back(row);
      }
  }
  return rows;
}

void run_spectral_study(const Config& cfg, const std::string& out_dir) {
  cfg.validate();
  {
    auto f = open_out(out_dir, "model_spectrum.csv");
    f << "model,s,steps,N1,k,mode,unit_formula,unit_computed,min_eig,max_eig,"
         "mu_max,closed_form_max,upper_bound\n";
    for (const auto& r : model_spectrum_study(cfg))
      f << r.model << "," << r.s << "," << r.steps << "," << r.n1 << "," << r.k
        << "," << r.mode << "," << opt_size(r.unit_formula) << ","
        << opt_size(r.unit_computed) << "," << fmt_double(r.min_eig) << ","
        << fmt_double(r.max_eig) << "," << fmt_double(r.mu_max) << ","
        << opt_double(r.closed_form_max) << "," << opt_double(r.upper_bound)
        << "\n";
    if (!f) throw Error(ErrorCode::Io, "failed writing model_spectrum.csv");
  }
  {
    auto f = open_out(out_dir, "saddle_intervals.csv");
    f << "model,s,p,N,lhat,k,rhat,lambda_D,Lambda_D,lambda_R,Lambda_R,"
         "lambda_S,Lambda_S,lambda_L,Lambda_L,kappa_D,neg_lo,neg_hi,mid_lo,"
         "mid_hi,pos_lo,pos_hi,computed_min_neg,computed_max_neg,"
         "computed_min_pos,computed_max_pos,outside\n";
    for (const auto& r : interval_study(cfg)) {
      const auto& s = r.summary;
      const auto& b = r.bounds;
      f << r.model << "," << r.s << "," << r.p << "," << r.n << ","
        << to_string(r.lhat) << ","
        << (r.lhat == LFlavor::LM ? std::to_string(r.k) : "") << ","
        << to_string(r.rhat);
      for (double v : {s.lD, s.LD, s.lR, s.LR, s.lS, s.LS, s.lL, s.LL, s.kappaD,
                       b.negative.lo, b.negative.hi, b.middle.lo, b.middle.hi,
                       b.positive.lo, b.positive.hi, r.min_neg, r.max_neg,
                       r.min_pos, r.max_pos})
        f << "," << fmt_double(v);
      f << "," << r.outside << "\n";
    }
    if (!f) throw Error(ErrorCode::Io, "failed writing saddle_intervals.csv");
  }
}

}  // namespace wc4dvar
