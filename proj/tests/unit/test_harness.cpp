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

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "wc4dvar/harness.hpp"

using namespace wc4dvar;

namespace {

const char* kSmall =
    "# small grid\n"
    "s = 24\n"
    "p = 12\n"
    "N = 3\n"
    "k = 1, 2, 4\n"
    "spinup_steps = 50\n"
    "b_maxval = 8\n"
    "q_maxval = 8\n"
    "r_block_size = 4\n";

std::vector<std::vector<std::string>> read_csv(const std::filesystem::path& p) {
  std::ifstream f(p);
  std::vector<std::vector<std::string>> rows;
  std::string line;
  while (std::getline(f, line)) {
    std::vector<std::string> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) row.push_back(cell);
    if (!line.empty() && line.back() == ',') row.emplace_back();
    rows.push_back(row);
  }
  return rows;
}

std::filesystem::path temp_dir(const std::string& name) {
  auto d = std::filesystem::temp_directory_path() / ("wc4dvar_test_" + name);
  std::filesystem::remove_all(d);
  return d;
}

}  // namespace

TEST(Config, DefaultsAndOverrides) {
  Config c;
  EXPECT_EQ(c.size("N"), 15u);
  EXPECT_EQ(c.real("tol"), 1e-6);
  EXPECT_EQ(c.size("maxit"), 1000u);
  auto d = Config::from_string("s = 30\n# comment\n\np=10\nrhat = diag, me\n");
  EXPECT_EQ(d.size("s"), 30u);
  EXPECT_EQ(d.size("p"), 10u);
  EXPECT_EQ(d.list("rhat"), (std::vector<std::string>{"diag", "me"}));
  EXPECT_FALSE(d.real_or_auto("rr_gamma").has_value());
}

TEST(Config, ErrorsCarryCodes) {
  try {
    Config::from_string("nonsense = 3\n");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::Parse);
  }
  EXPECT_THROW(Config::from_string("s 30\n"), Error);
  EXPECT_THROW(Config::from_string("s = abc\n").size("s"), Error);
  try {
    Config::from_file("/nonexistent/wc4dvar.cfg");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::Io);
  }
}

TEST(Config, ValidationRejectsBadCombinations) {
  EXPECT_THROW(Config::from_string("s = 10\np = 11\n").validate(), Error);
  EXPECT_THROW(Config::from_string("N = 3\nk = 5\n").validate(), Error);
  EXPECT_THROW(Config::from_string("lhat = L7\n").validate(), Error);
  EXPECT_THROW(Config::from_string("rhat = chol\n").validate(), Error);
  EXPECT_THROW(Config::from_string("shapes = PX\n").validate(), Error);
  EXPECT_NO_THROW(Config::from_string(kSmall).validate());
}

TEST(Config, FingerprintDeterministic) {
  auto a = Config::from_string(kSmall), b = Config::from_string(kSmall);
  EXPECT_EQ(a.fingerprint(), b.fingerprint());
  b.set("seed", "7");
  EXPECT_NE(a.fingerprint(), b.fingerprint());
}

TEST(Experiment, GridRowsCountersAndDeterminism) {
  auto cfg = Config::from_string(kSmall);
  auto dir1 = temp_dir("exp1"), dir2 = temp_dir("exp2");
  run_experiment(cfg, dir1.string());
  run_experiment(cfg, dir2.string());
  auto r1 = read_csv(dir1 / "experiment.csv"), r2 = read_csv(dir2 / "experiment.csv");
  ASSERT_EQ(r1.size(), r2.size());
  const auto& h = r1[0];
  std::map<std::string, std::size_t> col;
  for (std::size_t i = 0; i < h.size(); ++i) col[h[i]] = i;
  for (const char* name : {"k", "lhat", "rhat", "shape", "iterations", "wallclock_s",
                           "count_R", "count_D", "count_Dhat_inv", "count_Lhat_inv_t",
                           "count_Pinv", "fingerprint"})
    ASSERT_TRUE(col.count(name)) << name;

  // 2 shapes x (L0, LI, L + 3 LM values) x 5 R_hat
  EXPECT_EQ(r1.size() - 1, 2u * 6u * 5u);
  std::set<std::string> cells;
  std::map<std::string, std::string> iters;
  for (std::size_t i = 1; i < r1.size(); ++i) {
    auto a = r1[i], b = r2[i];
    a[col["wallclock_s"]].clear();
    b[col["wallclock_s"]].clear();
    EXPECT_EQ(a, b);
    const auto& row = r1[i];
    const std::string key = row[col["shape"]] + "/" + row[col["lhat"]] + "/" +
                            row[col["k"]] + "/" + row[col["rhat"]];
    EXPECT_TRUE(cells.insert(key).second) << key;
    EXPECT_EQ(row[col["converged"]], "1") << key;
    const auto count = [&](const char* c) { return std::stoull(row[col[c]]); };
    if (row[col["shape"]] == "PD") {
      EXPECT_EQ(count("count_D"), 2 * count("count_R")) << key;
      EXPECT_EQ(count("count_Dhat_inv"), count("count_R")) << key;
    } else {
      EXPECT_EQ(count("count_Dhat_inv"), 0u) << key;
      EXPECT_EQ(count("count_Lhat_inv_t"), count("count_Pinv")) << key;
    }
    iters[key] = row[col["iterations"]];
  }
  for (const char* shape : {"PD", "PI"})
    for (const char* rh : {"diag", "block", "rr", "me", "exact"}) {
      const std::string s(shape), r(rh);
      EXPECT_EQ(iters[s + "/LM/1/" + r], iters[s + "/L0//" + r]);
      EXPECT_EQ(iters[s + "/LM/4/" + r], iters[s + "/L//" + r]);
    }
  std::filesystem::remove_all(dir1);
  std::filesystem::remove_all(dir2);
}

TEST(Experiment, FailedCellIsRecordedAndRunContinues) {
  auto cfg = Config::from_string(kSmall);
  cfg.set("maxit", "2");
  cfg.set("shapes", "PD");
  cfg.set("lhat", "L0");
  cfg.set("rhat", "diag,exact");
  auto recs = run_grid(cfg);
  ASSERT_EQ(recs.size(), 2u);
  for (const auto& r : recs) {
    EXPECT_FALSE(r.report.converged);
    EXPECT_EQ(r.report.iterations, 2u);
  }
}

TEST(Spectra, TablesWrittenWithBoundColumns) {
  auto cfg = Config::from_string(
      "spectra_s = 40\nspectra_n1 = 4,7\nintervals_s = 10\nintervals_p = 5\n"
      "intervals_N = 2\nintervals_k = 2\nintervals_rhat = diag,exact\n");
  auto dir = temp_dir("spec");
  run_spectral_study(cfg, dir.string());
  auto ms = read_csv(dir / "model_spectrum.csv");
  ASSERT_EQ(ms.size(), 3u);
  std::map<std::string, std::size_t> col;
  for (std::size_t i = 0; i < ms[0].size(); ++i) col[ms[0][i]] = i;
  EXPECT_NEAR(std::stod(ms[2][col["upper_bound"]]), 7.4641, 5e-5);
  EXPECT_NEAR(std::stod(ms[1][col["upper_bound"]]), 4.7913, 5e-5);
  EXPECT_GE(std::stoul(ms[1][col["unit_computed"]]), std::stoul(ms[1][col["unit_formula"]]));
  auto th = read_csv(dir / "saddle_intervals.csv");
  EXPECT_EQ(th.size(), 1u + 4u * 2u);
  for (std::size_t i = 1; i < th.size(); ++i) EXPECT_EQ(th[i].back(), "0");
  std::filesystem::remove_all(dir);
}

TEST(Spectra, HeatMaximumApproachesLimitAsDimensionGrows) {
  double prev = 0.0, last = 0.0;
  for (std::size_t s : {100, 200, 400, 800}) {
    auto cfg = Config::from_string("spectra_n1 = 4\nspectra_dense_limit = 1000\n");
    cfg.set("spectra_s", std::to_string(s));
    auto rows = model_spectrum_study(cfg);
    ASSERT_EQ(rows.size(), 1u);
    EXPECT_GT(rows[0].max_eig, prev) << "s=" << s;
    EXPECT_LE(rows[0].max_eig, 4.7910 + 1e-6);
    prev = last = rows[0].max_eig;
  }
  EXPECT_NEAR(last, 4.7910, 1e-3);
}

TEST(Spectra, LorenzRowsCarryNoBound) {
  auto cfg = Config::from_string(
      "spectra_model = lorenz\nspectra_s = 10\nspectra_n1 = 4\nspinup_steps = 50\n");
  auto rows = model_spectrum_study(cfg);
  ASSERT_EQ(rows.size(), 1u);
  EXPECT_FALSE(rows[0].upper_bound.has_value());
  EXPECT_FALSE(rows[0].closed_form_max.has_value());
}

TEST(Format, SeventeenSignificantDigits) {
  EXPECT_EQ(fmt_double(0.1), "0.10000000000000001");
  EXPECT_EQ(fmt_double(2.0), "2");
}
