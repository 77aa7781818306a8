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

#include "wc4dvar/wc4dvar.h"

#include <cstring>
#include <new>
#include <string>

#include "wc4dvar/harness.hpp"

struct wcda_config {
  wc4dvar::Config cfg;
};

struct wcda_problem {
  explicit wcda_problem(const wc4dvar::Config& c) : prob(c) {}
  wc4dvar::Problem prob;
};

namespace {

thread_local std::string g_last_error;

wcda_status to_status(wc4dvar::ErrorCode c) {
  switch (c) {
    case wc4dvar::ErrorCode::InvalidArgument: return WCDA_INVALID_ARGUMENT;
    case wc4dvar::ErrorCode::Parse: return WCDA_PARSE;
    case wc4dvar::ErrorCode::Io: return WCDA_IO;
    case wc4dvar::ErrorCode::Dimension: return WCDA_DIMENSION;
    case wc4dvar::ErrorCode::Numerical: return WCDA_NUMERICAL;
    case wc4dvar::ErrorCode::NotConverged: return WCDA_NOT_CONVERGED;
    case wc4dvar::ErrorCode::Internal: return WCDA_INTERNAL;
  }
  return WCDA_INTERNAL;
}

template <class F>
wcda_status guarded(F&& f) {
  try {
    g_last_error.clear();
    f();
    return WCDA_OK;
  } catch (const wc4dvar::Error& e) {
    g_last_error = e.what();
    return to_status(e.code());
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
    return WCDA_INTERNAL;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return WCDA_INTERNAL;
  } catch (...) {
    g_last_error = "unknown error";
    return WCDA_INTERNAL;
  }
}

wcda_status null_arg(const char* what) {
  g_last_error = std::string("null argument: ") + what;
  return WCDA_INVALID_ARGUMENT;
}

wc4dvar::SaddlePreconditioner make_pc(wcda_problem* prob,
                                      const wcda_precond_spec* spec) {
  wc4dvar::require(spec->shape && spec->lhat && spec->rhat,
                   wc4dvar::ErrorCode::InvalidArgument,
                   "precond spec has a null field");
  const auto flavor = wc4dvar::parse_lflavor(spec->lhat);
  return prob->prob.preconditioner(wc4dvar::parse_shape(spec->shape), flavor,
                                   flavor == wc4dvar::LFlavor::LM ? spec->k : 0,
                                   wc4dvar::parse_rhat(spec->rhat));
}

}  // namespace

extern "C" {

const char* wcda_last_error(void) { return g_last_error.c_str(); }

const char* wcda_version(void) { return "0.1.0"; }

wcda_status wcda_config_create(wcda_config** out) {
  if (!out) return null_arg("out");
  return guarded([&] { *out = new wcda_config{}; });
}

wcda_status wcda_config_load(const char* path, wcda_config** out) {
  if (!path) return null_arg("path");
  if (!out) return null_arg("out");
  return guarded([&] {
    *out = new wcda_config{wc4dvar::Config::from_file(path)};
  });
}

wcda_status wcda_config_set(wcda_config* cfg, const char* key,
                            const char* value) {
  if (!cfg) return null_arg("cfg");
  if (!key || !value) return null_arg("key/value");
  return guarded([&] { cfg->cfg.set(key, value); });
}

wcda_status wcda_config_get(const wcda_config* cfg, const char* key, char* buf,
                            size_t buflen, size_t* needed) {
  if (!cfg) return null_arg("cfg");
  if (!key) return null_arg("key");
  return guarded([&] {
    const std::string v = cfg->cfg.get(key);
    if (needed) *needed = v.size() + 1;
    if (buf) {
      wc4dvar::require(buflen > v.size(), wc4dvar::ErrorCode::InvalidArgument,
                       "buffer too small for config value");
      std::memcpy(buf, v.c_str(), v.size() + 1);
    }
  });
}

void wcda_config_destroy(wcda_config* cfg) { delete cfg; }

wcda_status wcda_run_experiment(const wcda_config* cfg, const char* out_dir) {
  if (!cfg) return null_arg("cfg");
  if (!out_dir) return null_arg("out_dir");
  return guarded([&] { wc4dvar::run_experiment(cfg->cfg, out_dir); });
}

wcda_status wcda_run_spectral_study(const wcda_config* cfg, const char* out_dir) {
  if (!cfg) return null_arg("cfg");
  if (!out_dir) return null_arg("out_dir");
  return guarded([&] { wc4dvar::run_spectral_study(cfg->cfg, out_dir); });
}

wcda_status wcda_problem_create(const wcda_config* cfg, wcda_problem** out) {
  if (!cfg) return null_arg("cfg");
  if (!out) return null_arg("out");
  return guarded([&] { *out = new wcda_problem(cfg->cfg); });
}

size_t wcda_problem_dimension(const wcda_problem* prob) {
  return prob ? prob->prob.op().dim() : 0;
}

wcda_status wcda_problem_apply(const wcda_problem* prob, const double* x,
                               double* y) {
  if (!prob) return null_arg("prob");
  if (!x || !y) return null_arg("x/y");
  return guarded([&] {
    const std::size_t n = prob->prob.op().dim();
    wc4dvar::Vec xv(x, x + n), yv;
    prob->prob.op().apply(xv, yv);
    std::memcpy(y, yv.data(), n * sizeof(double));
  });
}

wcda_status wcda_problem_apply_preconditioner(wcda_problem* prob,
                                              const wcda_precond_spec* spec,
                                              const double* x, double* y) {
  if (!prob) return null_arg("prob");
  if (!spec) return null_arg("spec");
  if (!x || !y) return null_arg("x/y");
  return guarded([&] {
    const auto pc = make_pc(prob, spec);
    const std::size_t n = prob->prob.op().dim();
    wc4dvar::Vec xv(x, x + n), yv;
    pc.apply_inverse(xv, yv);
    std::memcpy(y, yv.data(), n * sizeof(double));
  });
}

wcda_status wcda_problem_solve(wcda_problem* prob, const wcda_precond_spec* spec,
                               double* x, wcda_solve_report* report) {
  if (!prob) return null_arg("prob");
  if (!spec) return null_arg("spec");
  return guarded([&] {
    const auto pc = make_pc(prob, spec);
    wc4dvar::SolveReport rep;
    const wc4dvar::Vec sol = prob->prob.solve(pc, rep);
    if (x) std::memcpy(x, sol.data(), sol.size() * sizeof(double));
    if (report) {
      const auto& c = rep.counters;
      *report = wcda_solve_report{rep.iterations, rep.converged ? 1 : 0,
                                  rep.final_relres, rep.wall_seconds,
                                  c.r, c.rhat_inv, c.d, c.dhat_inv,
                                  c.m, c.mt, c.h, c.ht,
                                  c.a, c.pinv,
                                  c.l, c.lt, c.lhat_inv, c.lhat_inv_t};
    }
  });
}

void wcda_problem_destroy(wcda_problem* prob) { delete prob; }

}  // extern "C"
