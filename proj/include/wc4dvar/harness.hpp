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

#ifndef WC4DVAR_HARNESS_HPP
#define WC4DVAR_HARNESS_HPP

#include <map>
#include <memory>
#include <optional>
#include <string>

#include "wc4dvar/krylov.hpp"
#include "wc4dvar/saddle.hpp"
#include "wc4dvar/spectra.hpp"

namespace wc4dvar {

/// Flat key = value configuration. Lines starting with '#' are comments.
/// Every key has a default; unknown keys are rejected.
class Config {
 public:
  Config();

  static Config from_file(const std::string& path);
  static Config from_string(const std::string& text);

  void set(const std::string& key, const std::string& value);
  std::string get(const std::string& key) const;
  bool has_key(const std::string& key) const;

  std::string str(const std::string& key) const { return get(key); }
  double real(const std::string& key) const;
  std::size_t size(const std::string& key) const;
  std::uint64_t u64(const std::string& key) const;
  bool flag(const std::string& key) const;
  std::vector<std::string> list(const std::string& key) const;
  std::vector<std::size_t> size_list(const std::string& key) const;
  /// Empty optional for "auto" or "".
  std::optional<double> real_or_auto(const std::string& key) const;

  /// Canonical "key=value\n" text in key order.
  std::string canonical() const;
  /// FNV-1a 64-bit hash of canonical().
  std::uint64_t fingerprint() const;
  /// Documented keys with their defaults.
  static const std::map<std::string, std::string>& defaults();

  void validate() const;

 private:
  std::map<std::string, std::string> kv_;
};

/// A built data-assimilation problem plus cached preconditioner pieces.
class Problem {
 public:
  explicit Problem(const Config& cfg);

  const Config& config() const { return cfg_; }
  const SaddleOperator& op() const { return *op_; }
  const SparseSym& Ri() const { return ri_; }
  const std::vector<std::size_t>& pvec() const { return pvec_; }
  const std::vector<BlockPtr>& models() const { return models_; }
  const Vec& rhs() const { return rhs_; }
  const BlockRInfo& r_info() const { return rinfo_; }

  std::shared_ptr<const RHat> rhat(RHatKind kind);
  std::shared_ptr<const DHat> dhat();
  BlockBandedOperator lhat(LFlavor flavor, std::size_t k) const;
  SaddlePreconditioner preconditioner(PrecondShape shape, LFlavor flavor,
                                      std::size_t k, RHatKind rkind);

  /// Solves with MINRES (block diagonal) or GMRES (inexact constraint).
  Vec solve(const SaddlePreconditioner& pc, SolveReport& report) const;

 private:
  Config cfg_;
  std::vector<BlockPtr> models_;
  std::unique_ptr<SaddleOperator> op_;
  SparseSym ri_;
  std::vector<std::size_t> pvec_;
  BlockRInfo rinfo_;
  Vec rhs_;
  std::map<RHatKind, std::shared_ptr<const RHat>> rhat_cache_;
  std::shared_ptr<const DHat> dhat_;
};

LFlavor parse_lflavor(const std::string& s);
RHatKind parse_rhat(const std::string& s);
PrecondShape parse_shape(const std::string& s);

struct RunRecord {
  std::string model;
  std::size_t s = 0, p = 0, n = 0;
  PrecondShape shape = PrecondShape::BlockDiag;
  LFlavor lhat = LFlavor::L0;
  std::size_t k = 0;  // 0 for flavors without k
  RHatKind rhat = RHatKind::Diag;
  std::string solver;
  SolveReport report;
  std::uint64_t fingerprint = 0;
  std::string error;  // non-empty when the cell failed to run
};

/// Runs every (shape, L_hat, k, R_hat) cell of the grid. `on_record`, when
/// set, sees each record as soon as its cell finishes.
std::vector<RunRecord> run_grid(
    const Config& cfg,
    const std::function<void(const RunRecord&)>& on_record = nullptr);

std::string experiment_csv_header();
std::string experiment_csv_row(const RunRecord& r);

/// Writes experiment.csv to out_dir; returns the records.
std::vector<RunRecord> run_experiment(const Config& cfg,
                                      const std::string& out_dir);

struct ModelSpectrumRow {
  std::string model;
  std::size_t s = 0, steps = 0, n1 = 0, k = 0;
  std::string mode;  // dense | extremes
  std::optional<std::size_t> unit_formula;
  std::optional<std::size_t> unit_computed;
  double min_eig = 0, max_eig = 0, mu_max = 0;
  std::optional<double> upper_bound;  // absent when ||M M^T|| > 1
  std::optional<double> closed_form_max;
};

struct IntervalRow {
  std::string model;
  std::size_t s = 0, p = 0, n = 0;
  LFlavor lhat = LFlavor::L0;
  std::size_t k = 0;
  RHatKind rhat = RHatKind::Diag;
  SpectralSummary summary;
  IntervalUnion bounds;
  double min_neg = 0, max_neg = 0, min_pos = 0, max_pos = 0;
  std::size_t outside = 0;
};

std::vector<ModelSpectrumRow> model_spectrum_study(const Config& cfg);
std::vector<IntervalRow> interval_study(const Config& cfg);

/// Writes model_spectrum.csv and saddle_intervals.csv to out_dir.
void run_spectral_study(const Config& cfg, const std::string& out_dir);

/// printf-style "%.17g".
std::string fmt_double(double v);

}  // namespace wc4dvar

#endif
