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

#include "safemrac/cli/figures.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <sstream>

#include "safemrac/certify.hpp"
#include "safemrac/cli/experiment.hpp"
#include "safemrac/errors.hpp"

namespace safemrac::cli
{

namespace
{

// Column positions (1-based, gnuplot convention) inside a trace block.
constexpr int kColT = 1;
constexpr int kColX1 = 2;
constexpr int kColX2 = 3;
constexpr int kColXr1 = 4;
constexpr int kColXr2 = 5;
constexpr int kColENorm = 6;
constexpr int kColH = 7;
constexpr int kColU = 9;
constexpr int kColRate = 10;

std::string num(double v)
{
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return buf;
}

/// Blue for the first trace, red for the last.
std::string trace_color(std::size_t k, std::size_t count)
{
  const double f = count > 1 ? static_cast<double>(k) / static_cast<double>(count - 1) : 0.0;
  const int red = static_cast<int>(std::lround(255.0 * f));
  char buf[16];
  std::snprintf(buf, sizeof(buf), "#%02x00%02x", red, 255 - red);
  return buf;
}

std::string quoted(std::string s)
{
  std::string out;
  for (char c : s) {
    if (c == '\'') {out += "''";} else {out += c;}
  }
  return "'" + out + "'";
}

void write_level_curve(std::ostream & os, const LevelSet & set)
{
  const SymmetricEigen eig = symmetric_eigen(set.shape);
  const Matrix inv_sqrt = eig.vectors *
    eig.values.cwiseSqrt().cwiseInverse().asDiagonal() * eig.vectors.transpose();
  os << "# level curve x^T P x = " << num(set.level) << "\n";
  for (int k = 0; k <= 360; ++k) {
    const double th = 2.0 * std::numbers::pi * k / 360.0;
    Vector dir(2);
    dir << std::cos(th), std::sin(th);
    const Vector y = std::sqrt(set.level) * (inv_sqrt * dir);
    os << num(y(0)) << "," << num(y(1)) << "\n";
  }
  os << "\n\n";
}

void require_planar(const FigureContext & ctx, const std::string & id)
{
  if (!ctx.safe_set) {
    throw ConfigError("figure '" + id + "' needs the safe set; pass a summary JSON or --config");
  }
  if (ctx.safe_set->shape.rows() != 2) {
    throw ConfigError("figure '" + id + "' is only defined for two-dimensional states");
  }
  for (const auto & tr : ctx.traces) {
    if (tr.log.state_dim < 2) {
      throw ConfigError("figure '" + id + "' needs columns x1, x2, xr1, xr2");
    }
  }
}

}  // namespace

const std::vector<std::string> & figure_ids()
{
  static const std::vector<std::string> ids{"geometry", "phase", "h-sweep", "tracking", "control"};
  return ids;
}

FigureFiles emit_figure_script(
  const FigureContext & ctx, const std::string & id,
  const std::filesystem::path & out_dir, const std::string & stem)
{
  const auto & ids = figure_ids();
  if (std::find(ids.begin(), ids.end(), id) == ids.end()) {
    std::string valid;
    for (const auto & v : ids) {
      valid += (valid.empty() ? "" : ", ") + v;
    }
    throw ConfigError("unknown figure id '" + id + "'; valid ids: " + valid);
  }
  if (ctx.traces.empty()) {
    throw ConfigError("figure '" + id + "' needs at least one trajectory");
  }
  for (const auto & tr : ctx.traces) {
    if (tr.log.records.empty()) {
      throw ConfigError("figure '" + id + "': trajectory '" + tr.label + "' has no samples");
    }
  }
  if (id == "phase" || id == "geometry") {
    require_planar(ctx, id);
  }

  const std::string base = stem + "_" + id;
  FigureFiles files{out_dir / (base + ".csv"), out_dir / (base + ".gp")};
  const std::string data_name = files.data_csv.filename().string();

  // Data: one block per trace, then level curves, then (geometry) eps circles.
  std::ostringstream data;
  for (const auto & tr : ctx.traces) {
    data << "# " << tr.label << ": t,x1,x2,xr1,xr2,e_norm,h,eps,u,eff_rate\n";
    for (const auto & r : tr.log.records) {
      const double x2 = r.x.size() > 1 ? r.x(1) : std::nan("");
      const double xr2 = r.xr.size() > 1 ? r.xr(1) : std::nan("");
      data << num(r.t) << "," << num(r.x(0)) << "," << num(x2) << "," << num(r.xr(0)) << "," <<
        num(xr2) << "," << num(r.e_norm) << "," << num(r.h) << "," << num(r.eps) << "," <<
        num(r.u(0)) << "," << num(r.eff_rate) << "\n";
    }
    data << "\n\n";
  }
  const std::size_t n_traces = ctx.traces.size();
  std::size_t block = n_traces;
  std::optional<std::size_t> safe_block;
  std::optional<std::size_t> ref_block;
  std::optional<std::size_t> circle_block;
  if (ctx.safe_set && ctx.safe_set->shape.rows() == 2) {
    write_level_curve(data, *ctx.safe_set);
    safe_block = block++;
    if (ctx.ref_set) {
      write_level_curve(data, *ctx.ref_set);
      ref_block = block++;
    }
  }
  if (id == "geometry") {
    const auto & recs = ctx.traces.front().log.records;
    data << "# performance-bound circles around sampled reference states\n";
    const std::size_t every = std::max<std::size_t>(1, recs.size() / 12);
    for (std::size_t k = 0; k < recs.size(); k += every) {
      const auto & r = recs[k];
      for (int j = 0; j <= 72; ++j) {
        const double th = 2.0 * std::numbers::pi * j / 72.0;
        data << num(r.xr(0) + r.eps * std::cos(th)) << "," << num(r.xr(1) + r.eps * std::sin(th)) <<
          "\n";
      }
      data << "\n";
    }
    data << "\n";
    circle_block = block++;
  }

  std::ostringstream gp;
  gp << "# gnuplot script; run from this directory: gnuplot " << files.script.filename().string() <<
    "\n";
  gp << "set datafile separator ','\n";
  gp << "set terminal pngcairo size 1000,750\n";
  gp << "set output " << quoted(base + ".png") << "\n";
  gp << "set grid\nset key outside right\n";
  const std::string src = quoted(data_name);

  auto trace_lines = [&](int xcol, int ycol, const std::string & suffix) {
      std::string out;
      for (std::size_t k = 0; k < n_traces; ++k) {
        out += (k ? ", \\\n     " : "") + src + " index " + std::to_string(k) + " using " +
          std::to_string(xcol) + ":" + std::to_string(ycol) + " with lines lc rgb '" +
          trace_color(k, n_traces) + "' title " + quoted(ctx.traces[k].label + suffix);
      }
      return out;
    };
  auto level_lines = [&]() {
      std::string out;
      if (safe_block) {
        out += ", \\\n     " + src + " index " + std::to_string(*safe_block) +
          " using 1:2 with lines lw 2 lc rgb '#000000' title 'safe set boundary'";
      }
      if (ref_block) {
        out += ", \\\n     " + src + " index " + std::to_string(*ref_block) +
          " using 1:2 with lines dt 2 lc rgb '#555555' title 'reference set boundary'";
      }
      return out;
    };

  if (id == "phase") {
    gp << "set title 'Phase portrait'\nset xlabel 'x_1'\nset ylabel 'x_2'\nset size ratio -1\n";
    gp << "plot " << trace_lines(kColX1, kColX2, "") << ", \\\n     " << src <<
      " index 0 using " << kColXr1 << ":" << kColXr2 <<
      " with lines dt 3 lc rgb '#00a000' title 'reference'" << level_lines() << "\n";
  } else if (id == "geometry") {
    gp << "set title 'Safe set, reference set and performance bound'\n";
    gp << "set xlabel 'x_1'\nset ylabel 'x_2'\nset size ratio -1\n";
    gp << "plot " << src << " index 0 using " << kColXr1 << ":" << kColXr2 <<
      " with lines lc rgb '#00a000' title 'reference trajectory', \\\n     " << src <<
      " index " << *circle_block <<
      " using 1:2 with lines lc rgb '#8080ff' title 'ball of radius eps(t)'" << level_lines() <<
      "\n";
  } else if (id == "h-sweep") {
    gp << "set title 'Barrier h(t, e(t))'\nset xlabel 't [s]'\nset ylabel 'h'\n";
    gp << "plot " << trace_lines(kColT, kColH, "") << "\n";
  } else if (id == "tracking") {
    gp << "set multiplot layout 3,1 title 'Reference tracking'\nset xlabel 't [s]'\n";
    gp << "set ylabel 'x_1'\nplot " << trace_lines(kColT, kColX1, "") << ", \\\n     " << src <<
      " index 0 using " << kColT << ":" << kColXr1 <<
      " with lines dt 2 lc rgb '#00a000' title 'reference'\n";
    gp << "set ylabel 'x_2'\nplot " << trace_lines(kColT, kColX2, "") << ", \\\n     " << src <<
      " index 0 using " << kColT << ":" << kColXr2 <<
      " with lines dt 2 lc rgb '#00a000' title 'reference'\n";
    gp << "set ylabel '|e|'\nplot " << trace_lines(kColT, kColENorm, "") << "\n";
    gp << "unset multiplot\n";
  } else {
    gp << "set multiplot layout 2,1 title 'Control input and effective adaptation rate'\n";
    gp << "set xlabel 't [s]'\n";
    gp << "set ylabel 'u'\nplot " << trace_lines(kColT, kColU, "") << "\n";
    gp << "set ylabel 'gamma (h+V)/h^2'\nset logscale y\nplot " <<
      trace_lines(kColT, kColRate, "") << "\n";
    gp << "unset multiplot\n";
  }

  auto write = [](const std::filesystem::path & path, const std::string & text) {
      std::ofstream out(path, std::ios::binary);
      if (!out || !(out << text)) {
        throw IoError("cannot write '" + path.string() + "'");
      }
    };
  write(files.data_csv, data.str());
  write(files.script, gp.str());
  return files;
}

}  // namespace safemrac::cli
