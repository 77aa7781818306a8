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

#ifndef WC4DVAR_COMMON_HPP
#define WC4DVAR_COMMON_HPP

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace wc4dvar {

using Vec = std::vector<double>;

enum class ErrorCode {
  InvalidArgument = 1,
  Parse,
  Io,
  Dimension,
  Numerical,
  NotConverged,
  Internal
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

// Thrown when an iterative eigensolve stops early; carries the best estimate.
class NotConvergedError : public Error {
 public:
  NotConvergedError(const std::string& what, std::vector<double> best)
      : Error(ErrorCode::NotConverged, what), best_(std::move(best)) {}
  const std::vector<double>& best_estimate() const noexcept { return best_; }

 private:
  std::vector<double> best_;
};

inline void require(bool cond, ErrorCode code, const std::string& msg) {
  if (!cond) throw Error(code, msg);
}

inline void require_dim(std::size_t got, std::size_t want, const char* what) {
  if (got != want)
    throw Error(ErrorCode::Dimension, std::string(what) + ": expected length " +
                                          std::to_string(want) + ", got " +
                                          std::to_string(got));
}

// Per-constituent application tallies. Block-level counters (r, rhat_inv, d,
// dhat_inv, m, mt) count single s x s or p x p block applications.
struct OpCounters {
  std::uint64_t r = 0;
  std::uint64_t rhat_inv = 0;
  std::uint64_t d = 0;
  std::uint64_t dhat_inv = 0;
  std::uint64_t m = 0;
  std::uint64_t mt = 0;
  std::uint64_t h = 0;
  std::uint64_t ht = 0;
  std::uint64_t l = 0;
  std::uint64_t lt = 0;
  std::uint64_t lhat_inv = 0;
  std::uint64_t lhat_inv_t = 0;
  std::uint64_t a = 0;
  std::uint64_t pinv = 0;

  void reset() { *this = OpCounters{}; }
};

// y = op(x); y is resized by the callee.
using LinearMap = std::function<void(const Vec& x, Vec& y)>;

inline double dot(const Vec& a, const Vec& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline double norm2(const Vec& a) { return std::sqrt(dot(a, a)); }

inline void axpy(double alpha, const Vec& x, Vec& y) {
  for (std::size_t i = 0; i < x.size(); ++i) y[i] += alpha * x[i];
}

// Seeded 64-bit generator with a portable uniform mapping, so that draws do
// not depend on the standard library's distribution implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : g_(seed) {}

  double uniform() { return static_cast<double>(g_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  std::size_t index(std::size_t n) {
    return static_cast<std::size_t>(uniform() * static_cast<double>(n));
  }
  double normal() {
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
  }
  Vec normal_vector(std::size_t n) {
    Vec v(n);
    for (auto& e : v) e = normal();
    return v;
  }

 private:
  std::mt19937_64 g_;
};

}  // namespace wc4dvar

#endif
