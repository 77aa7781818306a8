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

// Command line driver. Talks to the library through the C interface only.

#include <cstdio>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "wc4dvar/wc4dvar.h"

namespace {

struct Options {
  std::string config;
  std::string out = "results";
  std::string seed;
  std::vector<std::string> sets;
};

int fail(const char* what, wcda_status st) {
  std::fprintf(stderr, "wc4dvar: %s failed (status %d): %s\n", what,
               static_cast<int>(st), wcda_last_error());
  return 1;
}

int run(const Options& o, bool spectra) {
  wcda_config* cfg = nullptr;
  wcda_status st = o.config.empty() ? wcda_config_create(&cfg)
                                    : wcda_config_load(o.config.c_str(), &cfg);
  if (st != WCDA_OK) return fail("loading config", st);

  int rc = 0;
  if (!o.seed.empty()) st = wcda_config_set(cfg, "seed", o.seed.c_str());
  for (const auto& kv : o.sets) {
    if (st != WCDA_OK) break;
    const auto eq = kv.find('=');
    if (eq == std::string::npos) {
      std::fprintf(stderr, "wc4dvar: --set expects key=value, got '%s'\n",
                   kv.c_str());
      wcda_config_destroy(cfg);
      return 2;
    }
    st = wcda_config_set(cfg, kv.substr(0, eq).c_str(),
                         kv.substr(eq + 1).c_str());
  }
  if (st != WCDA_OK) {
    rc = fail("applying overrides", st);
  } else {
    st = spectra ? wcda_run_spectral_study(cfg, o.out.c_str())
                 : wcda_run_experiment(cfg, o.out.c_str());
    if (st != WCDA_OK)
      rc = fail(spectra ? "spectral study" : "experiment", st);
    else
      std::printf("wrote %s/%s\n", o.out.c_str(),
                  spectra ? "model_spectrum.csv and saddle_intervals.csv"
                          : "experiment.csv");
  }
  wcda_config_destroy(cfg);
  return rc;
}

void add_common(CLI::App* sub, Options& o) {
  sub->add_option("--config", o.config, "key = value config file")
      ->check(CLI::ExistingFile);
  sub->add_option("--out", o.out, "output directory")->capture_default_str();
  sub->add_option("--seed", o.seed, "RNG seed (overrides the config)");
  sub->add_option("--set", o.sets, "extra key=value override (repeatable)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Preconditioned saddle point solvers for weak-constraint 4D-Var"};
  app.set_version_flag("--version", std::string(wcda_version()));
  app.require_subcommand(1);

  Options exp_opts, spec_opts;
  auto* exp = app.add_subcommand("experiment",
                                 "solve the grid of preconditioners, write experiment.csv");
  add_common(exp, exp_opts);
  auto* spec = app.add_subcommand(
      "spectra", "spectral studies, write model_spectrum.csv and saddle_intervals.csv");
  add_common(spec, spec_opts);

  CLI11_PARSE(app, argc, argv);
  if (exp->parsed()) return run(exp_opts, false);
  return run(spec_opts, true);
}
