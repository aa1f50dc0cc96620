// Copyright 2026 The safemrac Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "safemrac/cli/trajectory_csv.hpp"

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <regex>
#include <sstream>

#include "safemrac/cli/experiment.hpp"
#include "safemrac/errors.hpp"

namespace safemrac::cli
{

namespace
{

void put(std::string & line, double v)
{
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  if (!line.empty()) {
    line += ',';
  }
  line += buf;
}

void put(std::string & line, const Vector & v)
{
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    put(line, v(i));
  }
}

std::vector<std::string> split(const std::string & s, char sep)
{
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(s);
  while (std::getline(in, item, sep)) {
    out.push_back(item);
  }
  if (!s.empty() && s.back() == sep) {
    out.emplace_back();
  }
  return out;
}

}  // namespace

std::vector<std::string> csv_columns(
  Eigen::Index state_dim, Eigen::Index input_dim, Eigen::Index weight_count)
{
  std::vector<std::string> cols{"t"};
  for (const char * prefix : {"x", "xr", "e"}) {
    for (Eigen::Index i = 1; i <= state_dim; ++i) {
      cols.push_back(prefix + std::to_string(i));
    }
  }
  for (const char * name : {"e_norm", "V", "h", "eps"}) {
    cols.emplace_back(name);
  }
  for (const char * prefix : {"u", "u_n"}) {
    if (input_dim == 1) {
      cols.emplace_back(prefix);
    } else {
      for (Eigen::Index i = 1; i <= input_dim; ++i) {
        cols.push_back(prefix + std::to_string(i));
      }
    }
  }
  for (const char * name : {"psi", "eff_rate", "safe_margin"}) {
    cols.emplace_back(name);
  }
  for (Eigen::Index i = 1; i <= weight_count; ++i) {
    cols.push_back("W_hat_" + std::to_string(i));
  }
  return cols;
}

void write_trajectory_csv(std::ostream & os, const TrajectoryLog & log)
{
  const auto cols = csv_columns(log.state_dim, log.input_dim, log.regressor_dim * log.input_dim);
  std::string line;
  for (std::size_t i = 0; i < cols.size(); ++i) {
    line += (i ? "," : "") + cols[i];
  }
  os << line << '\n';
  for (const LogRecord & r : log.records) {
    line.clear();
    put(line, r.t);
    put(line, r.x);
    put(line, r.xr);
    put(line, r.e);
    put(line, r.e_norm);
    put(line, r.V);
    put(line, r.h);
    put(line, r.eps);
    put(line, r.u);
    put(line, r.u_n);
    put(line, r.psi);
    put(line, r.eff_rate);
    put(line, r.safe_margin);
    put(line, r.W_hat);
    os << line << '\n';
  }
}

void write_trajectory_csv(const std::filesystem::path & path, const TrajectoryLog & log)
{
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw IoError("cannot open '" + path.string() + "' for writing");
  }
  write_trajectory_csv(out, log);
  if (!out) {
    throw IoError("failed writing '" + path.string() + "'");
  }
}

TrajectoryLog read_trajectory_csv(std::istream & is)
{
  std::string header;
  if (!std::getline(is, header)) {
    throw ConfigError("trajectory CSV is empty; a header row is mandatory");
  }
  const auto names = split(header, ',');

  static const std::regex state_col("x[0-9]+");
  static const std::regex input_col("u[0-9]+");
  Eigen::Index n = 0;
  Eigen::Index m = 0;
  Eigen::Index k = 0;
  for (const auto & name : names) {
    if (std::regex_match(name, state_col)) {++n;}
    if (name == "u" || std::regex_match(name, input_col)) {++m;}
    if (name.rfind("W_hat_", 0) == 0) {++k;}
  }
  const auto expected = csv_columns(n, m, k);
  std::string missing;
  for (const auto & col : expected) {
    if (std::find(names.begin(), names.end(), col) == names.end()) {
      missing += (missing.empty() ? "" : ", ") + col;
    }
  }
  if (n == 0 || m == 0) {
    missing += std::string(missing.empty() ? "" : ", ") + (n == 0 ? "x1" : "u");
  }
  if (!missing.empty()) {
    throw ConfigError("trajectory CSV is missing columns: " + missing);
  }
  if (names != expected) {
    throw ConfigError("trajectory CSV columns are out of order or unexpected");
  }
  if (k % m != 0) {
    throw ConfigError("trajectory CSV weight column count is not a multiple of the input count");
  }

  TrajectoryLog log;
  log.state_dim = n;
  log.input_dim = m;
  log.regressor_dim = k / m;

  std::string line;
  std::size_t line_no = 1;
  while (std::getline(is, line)) {
    ++line_no;
    if (line.empty()) {
      continue;
    }
    const auto fields = split(line, ',');
    if (fields.size() != expected.size()) {
      throw ConfigError(
              "trajectory CSV line " + std::to_string(line_no) + " has " +
              std::to_string(fields.size()) + " fields, expected " +
              std::to_string(expected.size()));
    }
    std::vector<double> v(fields.size());
    for (std::size_t i = 0; i < fields.size(); ++i) {
      char * end = nullptr;
      v[i] = std::strtod(fields[i].c_str(), &end);
      if (fields[i].empty() || *end != '\0') {
        throw ConfigError(
                "trajectory CSV line " + std::to_string(line_no) + ", column '" + expected[i] +
                "': not a number");
      }
    }
    std::size_t at = 0;
    auto take = [&](Eigen::Index len) {
        Vector out = Eigen::Map<const Vector>(v.data() + at, len);
        at += static_cast<std::size_t>(len);
        return out;
      };
    LogRecord r;
    r.t = v[at++];
    r.x = take(n);
    r.xr = take(n);
    r.e = take(n);
    r.e_norm = v[at++];
    r.V = v[at++];
    r.h = v[at++];
    r.eps = v[at++];
    r.u = take(m);
    r.u_n = take(m);
    r.psi = v[at++];
    r.eff_rate = v[at++];
    r.safe_margin = v[at++];
    r.W_hat = take(k);
    log.records.push_back(std::move(r));
  }
  return log;
}

TrajectoryLog read_trajectory_csv(const std::filesystem::path & path)
{
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw IoError("cannot open '" + path.string() + "'");
  }
  return read_trajectory_csv(in);
}

}  // namespace safemrac::cli
