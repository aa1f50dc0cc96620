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

#include <fstream>

#include <json.hpp>

#include "safemrac/cli/experiment.hpp"
#include "safemrac/cli/figures.hpp"
#include "safemrac/cli/trajectory_csv.hpp"
#include "safemrac/errors.hpp"

namespace safemrac::cli
{

namespace
{

void attach_sets(FigureContext & ctx, const ExperimentConfig & cfg)
{
  const Scenario scenario = build_scenario(cfg);
  const SimConfig sim = build_sim_config(cfg, scenario);
  ctx.safe_set = sim.bound.safe_set;
  ctx.ref_set = sim.bound.ref_set;
}

}  // namespace

FigureContext load_figure_context(
  const std::filesystem::path & input,
  const std::optional<std::filesystem::path> & config_path)
{
  FigureContext ctx;
  if (input.extension() == ".csv") {
    ctx.traces.push_back({input.stem().string(), read_trajectory_csv(input)});
    if (config_path) {
      attach_sets(ctx, load_config(*config_path));
    }
    return ctx;
  }

  std::ifstream in(input, std::ios::binary);
  if (!in) {
    throw IoError("cannot open '" + input.string() + "'");
  }
  nlohmann::json summary;
  try {
    summary = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error & ex) {
    throw ConfigError("'" + input.string() + "' is not valid JSON: " + ex.what());
  }
  if (!summary.contains("traces") || !summary["traces"].is_array()) {
    throw ConfigError("'" + input.string() + "' has no 'traces' list; is it a summary file?");
  }
  for (const auto & tr : summary["traces"]) {
    if (!tr.contains("label") || !tr.contains("csv")) {
      throw ConfigError("summary trace entries need 'label' and 'csv'");
    }
    const auto csv = input.parent_path() / tr["csv"].get<std::string>();
    ctx.traces.push_back({tr["label"].get<std::string>(), read_trajectory_csv(csv)});
  }
  if (config_path) {
    attach_sets(ctx, load_config(*config_path));
  } else if (summary.contains("config")) {
    attach_sets(ctx, config_from_json(summary["config"]));
  }
  return ctx;
}

}  // namespace safemrac::cli
