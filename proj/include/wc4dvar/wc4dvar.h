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

/* C interface to the weak-constraint 4D-Var saddle point solvers. */

#ifndef WC4DVAR_H
#define WC4DVAR_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(WC4DVAR_BUILDING_LIBRARY)
#    define WCDA_API __declspec(dllexport)
#  else
#    define WCDA_API __declspec(dllimport)
#  endif
#else
#  define WCDA_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum wcda_status {
  WCDA_OK = 0,
  WCDA_INVALID_ARGUMENT = 1,
  WCDA_PARSE = 2,
  WCDA_IO = 3,
  WCDA_DIMENSION = 4,
  WCDA_NUMERICAL = 5,
  WCDA_NOT_CONVERGED = 6,
  WCDA_INTERNAL = 7
} wcda_status;

typedef struct wcda_config wcda_config;
typedef struct wcda_problem wcda_problem;

/* Preconditioner selection. Strings use the config spellings:
 * shape "PD" | "PI", lhat "L0" | "LI" | "LM" | "L",
 * rhat "diag" | "block" | "rr" | "me" | "exact". k is used for LM only. */
typedef struct wcda_precond_spec {
  const char* shape;
  const char* lhat;
  size_t k;
  const char* rhat;
} wcda_precond_spec;

typedef struct wcda_solve_report {
  size_t iterations;
  int converged;
  double final_relres;
  double wall_seconds;
  uint64_t count_R, count_Rhat_inv, count_D, count_Dhat_inv;
  uint64_t count_M, count_Mt, count_H, count_Ht;
  uint64_t count_A, count_Pinv;
  uint64_t count_L, count_Lt, count_Lhat_inv, count_Lhat_inv_t;
} wcda_solve_report;

/* Message for the last failing call on this thread ("" if none). */
WCDA_API const char* wcda_last_error(void);
WCDA_API const char* wcda_version(void);

/* A config starts from the documented defaults. */
WCDA_API wcda_status wcda_config_create(wcda_config** out);
WCDA_API wcda_status wcda_config_load(const char* path, wcda_config** out);
WCDA_API wcda_status wcda_config_set(wcda_config* cfg, const char* key,
                                     const char* value);
/* Copies the value (NUL-terminated) into buf; *needed receives the length
 * including the terminator. Passing buf = NULL queries the length only. */
WCDA_API wcda_status wcda_config_get(const wcda_config* cfg, const char* key,
                                     char* buf, size_t buflen, size_t* needed);
WCDA_API void wcda_config_destroy(wcda_config* cfg);

/* Writes experiment.csv into out_dir. */
WCDA_API wcda_status wcda_run_experiment(const wcda_config* cfg,
                                         const char* out_dir);
/* Writes model_spectrum.csv and saddle_intervals.csv into out_dir. */
WCDA_API wcda_status wcda_run_spectral_study(const wcda_config* cfg,
                                             const char* out_dir);

WCDA_API wcda_status wcda_problem_create(const wcda_config* cfg,
                                         wcda_problem** out);
WCDA_API size_t wcda_problem_dimension(const wcda_problem* prob);
/* y = A x; both of length wcda_problem_dimension. */
WCDA_API wcda_status wcda_problem_apply(const wcda_problem* prob,
                                        const double* x, double* y);
WCDA_API wcda_status wcda_problem_apply_preconditioner(
    wcda_problem* prob, const wcda_precond_spec* spec, const double* x,
    double* y);
/* Solves A x = b for the problem's right-hand side from a zero guess.
 * x may be NULL. Non-convergence is reported through report->converged,
 * not the status. */
WCDA_API wcda_status wcda_problem_solve(wcda_problem* prob,
                                        const wcda_precond_spec* spec,
                                        double* x, wcda_solve_report* report);
WCDA_API void wcda_problem_destroy(wcda_problem* prob);

#ifdef __cplusplus
}
#endif

#endif
