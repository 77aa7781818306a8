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

#include <charconv>
#include <fstream>
#include <sstream>

#include "wc4dvar/harness.hpp"

namespace wc4dvar {

const std::map<std::string, std::string>& Config::defaults() {
  static const std::map<std::string, std::string> d = {
      // problem
      {"experiment", "lorenz"},
      {"s", "250"},
      {"p", "125"},
      {"N", "15"},
      {"steps_per_subwindow", "10"},
      {"dt", "1e-4"},
      {"forcing", "8"},
      {"spinup_steps", "1000"},
      {"heat_r", "0.4"},
      {"seed", "20260101"},
      // background and model error covariances
      {"d_model", "soar"},
      {"b_lengthscale", "0.6"},
      {"b_maxval", "100"},
      {"b_sigma", "0.4"},
      {"q_lengthscale", "0.5"},
      {"q_maxval", "120"},
      {"q_sigma", "0.2"},
      {"dhat", "ridge_ichol"},
      {"dhat_delta", "0.01"},
      // observation error covariance and operator
      {"r_block_size", "10"},
      {"r_instruments", "4"},
      {"r_pcorr", "40"},
      {"r_pcorr_decay", "0.99"},
      {"r_pcorr_cross", "0.02"},
      {"r_density", "0.1"},
      {"r_floor", "0.41"},
      {"r_floor_threshold", "1.0"},
      {"r_soar_lengthscale", "0.8"},
      {"r_soar_maxval", "20"},
      {"r_soar_sigma", "1.0"},
      {"h_smoothing", "true"},
      // R_hat parameters
      {"block_tol", "auto"},
      {"block_maxsize", ""},
      {"block_numproc", ""},
      {"rr_gamma", "auto"},
      {"me_threshold", "auto"},
      // grid and solver
      {"shapes", "PD,PI"},
      {"lhat", "L0,LI,LM,L"},
      {"k", "1,2,3,4,5,8,16"},
      {"rhat", "diag,block,rr,me,exact"},
      {"tol", "1e-6"},
      {"maxit", "1000"},
      {"minres_refresh", "0"},
      // spectral study
      {"spectra_model", "heat"},
      {"spectra_s", "100"},
      {"spectra_steps", "10"},
      {"spectra_heat_r", "0.4"},
      {"spectra_k", "3"},
      {"spectra_n1", "4,5,6,7"},
      {"spectra_dense_limit", "2000"},
      {"intervals_model", "lorenz"},
      {"intervals_s", "20"},
      {"intervals_p", "10"},
      {"intervals_N", "3"},
      {"intervals_k", "3"},
      {"intervals_lhat", "L0,LI,LM,L"},
      {"intervals_rhat", "diag,block,rr,me,exact"},
  };
  return d;
}

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

[[noreturn]] void bad_value(const std::string& key, const std::string& v,
                            const char* what) {
  throw Error(ErrorCode::Parse,
              "config: key '" + key + "' expects " + what + ", got '" + v + "'");
}

}  // namespace

Config::Config() : kv_(defaults()) {}

Config Config::from_string(const std::string& text) {
  Config c;
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos)
      throw Error(ErrorCode::Parse,
                  "config line " + std::to_string(lineno) + ": missing '='");
    c.set(trim(t.substr(0, eq)), trim(t.substr(eq + 1)));
  }
  return c;
}

Config Config::from_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw Error(ErrorCode::Io, "config: cannot open '" + path + "'");
  std::stringstream ss;
  ss << f.rdbuf();
  return from_string(ss.str());
}

void Config::set(const std::string& key, const std::string& value) {
  if (!defaults().count(key))
    throw Error(ErrorCode::Parse, "config: unknown key '" + key + "'");
  kv_[key] = value;
}

std::string Config::get(const std::string& key) const {
  auto it = kv_.find(key);
  if (it == kv_.end())
    throw Error(ErrorCode::Parse, "config: unknown key '" + key + "'");
  return it->second;
}

bool Config::has_key(const std::string& key) const { return kv_.count(key) > 0; }

double Config::real(const std::string& key) const {
  const std::string v = get(key);
  try {
    std::size_t pos = 0;
    const double d = std::stod(v, &pos);
    if (pos != v.size()) bad_value(key, v, "a number");
    return d;
  } catch (const std::logic_error&) {
    bad_value(key, v, "a number");
  }
}

std::uint64_t Config::u64(const std::string& key) const {
  const std::string v = get(key);
  std::uint64_t out = 0;
  auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || p != v.data() + v.size() || v.empty())
    bad_value(key, v, "a nonnegative integer");
  return out;
}

std::size_t Config::size(const std::string& key) const {
  return static_cast<std::size_t>(u64(key));
}

bool Config::flag(const std::string& key) const {
  const std::string v = get(key);
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  bad_value(key, v, "a boolean");
}

std::vector<std::string> Config::list(const std::string& key) const {
  std::vector<std::string> out;
  std::stringstream ss(get(key));
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::vector<std::size_t> Config::size_list(const std::string& key) const {
  std::vector<std::size_t> out;
  for (const auto& item : list(key)) {
    std::size_t v = 0;
    auto [p, ec] = std::from_chars(item.data(), item.data() + item.size(), v);
    if (ec != std::errc() || p != item.data() + item.size())
      bad_value(key, item, "a list of nonnegative integers");
    out.push_back(v);
  }
  return out;
}

std::optional<double> Config::real_or_auto(const std::string& key) const {
  const std::string v = get(key);
  if (v.empty() || v == "auto") return std::nullopt;
  return real(key);
}

std::string Config::canonical() const {
  std::string out;
  for (const auto& [k, v] : kv_) out += k + "=" + v + "\n";
  return out;
}

std::uint64_t Config::fingerprint() const {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : canonical()) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

void Config::validate() const {
  const std::string ex = str("experiment");
  require(ex == "lorenz" || ex == "heat", ErrorCode::InvalidArgument,
          "config: experiment must be 'lorenz' or 'heat'");
  const std::size_t s = size("s"), p = size("p"), n = size("N");
  require(p >= 1 && p <= s, ErrorCode::InvalidArgument,
          "config: need 1 <= p <= s");
  require(n >= 1, ErrorCode::InvalidArgument, "config: need N >= 1");
  for (auto k : size_list("k"))
    require(k >= 1 && k <= n + 1, ErrorCode::InvalidArgument,
            "config: k entries must lie in [1, N+1]");
  for (const auto& v : list("shapes")) parse_shape(v);
  for (const auto& v : list("lhat")) parse_lflavor(v);
  for (const auto& v : list("rhat")) parse_rhat(v);
  const std::string dm = str("d_model");
  require(dm == "soar" || dm == "identity", ErrorCode::InvalidArgument,
          "config: d_model must be 'soar' or 'identity'");
  const std::string dh = str("dhat");
  require(dh == "ridge_ichol" || dh == "exact", ErrorCode::InvalidArgument,
          "config: dhat must be 'ridge_ichol' or 'exact'");
  require(real("tol") > 0.0, ErrorCode::InvalidArgument, "config: tol must be > 0");
  size("maxit");
  u64("seed");
  flag("h_smoothing");
}

}  // namespace wc4dvar
