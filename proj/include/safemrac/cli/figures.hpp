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

#ifndef SAFEMRAC__CLI__FIGURES_HPP_
#define SAFEMRAC__CLI__FIGURES_HPP_

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "safemrac/safety.hpp"
#include "safemrac/sim.hpp"

namespace safemrac::cli
{

struct FigureTrace
{
  std::string label;
  TrajectoryLog log;
};

struct FigureContext
{
  std::vector<FigureTrace> traces;
  std::optional<LevelSet> safe_set;
  std::optional<LevelSet> ref_set;
};

/// geometry, phase, h-sweep, tracking, control
const std::vector<std::string> & figure_ids();

struct FigureFiles
{
  std::filesystem::path data_csv;
  std::filesystem::path script;
};

/// Writes `<stem>_<id>.csv` (one block per trace, then level-curve blocks)
/// and a gnuplot script `<stem>_<id>.gp` rendering `<stem>_<id>.png`.
/// Unknown ids and contexts lacking what a figure needs raise ConfigError.
FigureFiles emit_figure_script(
  const FigureContext & ctx, const std::string & id,
  const std::filesystem::path & out_dir, const std::string & stem);

/// Rebuilds a figure context from a run/sweep/compare summary JSON (which
/// names its trajectory CSVs and embeds the config) or from a bare trajectory
/// CSV. For a bare CSV the set geometry comes from `config_path` when given.
FigureContext load_figure_context(
  const std::filesystem::path & input,
  const std::optional<std::filesystem::path> & config_path = std::nullopt);

}  // namespace safemrac::cli

#endif  // SAFEMRAC__CLI__FIGURES_HPP_
