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

#ifndef SAFEMRAC__CLI__EXPERIMENT_HPP_
#define SAFEMRAC__CLI__EXPERIMENT_HPP_

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "safemrac/errors.hpp"
#include "safemrac/sim.hpp"

namespace safemrac::cli
{

/// Exit codes of every verb.
enum ExitCode : int
{
  kExitCompleted = 0,
  kExitConfigError = 1,
  kExitSafetyEvent = 2,
  kExitBlowup = 3,
};

/// How eps_bar is obtained in constant-bound mode.
enum class EpsBarSource { literal, reference_set_distance };

/// Van der Pol experiment description. Every key of the JSON file maps to
/// one field here; defaults mirror the literal Van der Pol study values.
struct ExperimentConfig
{
  std::string name{"vdp"};
  std::string output_dir{"out"};
  std::vector<std::string> figures;

  double dt{1e-3};
  double horizon{30.0};
  std::vector<double> x0{2.0, 2.0};
  std::vector<double> xr0{2.0, 2.0};
  double gamma{1.0};
  std::string controller_mode{"adaptive"};   // adaptive | nominal_only
  std::string bound_mode{"constant"};        // constant | time_varying
  double eps_bar{1.3};
  std::string eps_bar_source{"literal"};     // literal | reference_set_distance
  double ss_level{3.2};
  double sr_level{2.8};
  std::vector<std::vector<double>> R{{1.0, 0.0}, {0.0, 1.0}};
  double l1{3.0};
  double l2{3.0};
  double mu{1.0};
  double command_amplitude{1.2};
  bool uncertainty{true};
  double lambda{0.75};
  std::vector<std::vector<double>> W_hat0{{0.0}, {0.0}, {0.0}, {0.0}};
  double theta_min{-10.0};
  double theta_max{10.0};
  double nu{0.1};
  std::size_t log_stride{10};

  bool operator==(const ExperimentConfig &) const = default;
};

/// Throws ConfigError naming the offending key.
void validate(const ExperimentConfig & cfg);

/// Strict parse: unknown keys and wrong types are errors. Parse errors carry
/// line and column.
ExperimentConfig config_from_json(const nlohmann::json & j);
ExperimentConfig parse_config(const std::string & text);
ExperimentConfig load_config(const std::filesystem::path & path);
nlohmann::json config_to_json(const ExperimentConfig & cfg);

/// The scenario (plant, reference, nominal law) and sim settings a config describes.
Scenario build_scenario(const ExperimentConfig & cfg);
SimConfig build_sim_config(const ExperimentConfig & cfg, const Scenario & scenario);

/// Observations about the set geometry that do not stop a run but make the
/// safety guarantee inapplicable (initial state outside S_s, eps_bar larger
/// than the Remark-style reference-set distance, ...).
std::vector<std::string> setup_notes(const ExperimentConfig & cfg);

int exit_code_for(Verdict verdict);

/// The effective output directory: SAFEMRAC_OUT when set, the config value otherwise.
std::filesystem::path output_directory(const ExperimentConfig & cfg);

nlohmann::json summary_to_json(const RunSummary & summary);

struct ExperimentResult
{
  int exit_code{kExitCompleted};
  std::filesystem::path trajectory_csv;
  std::filesystem::path summary_json;
  std::vector<std::filesystem::path> figure_scripts;
  TrajectoryLog log;
};

/// Runs one experiment and writes `<name>_trajectory.csv`, `<name>_summary.json`
/// and one plot script per selected figure. I/O failures throw IoError.
ExperimentResult run_experiment(const ExperimentConfig & cfg);

struct SweepResult
{
  int exit_code{kExitCompleted};
  std::filesystem::path summary_json;
  std::vector<SweepEntry> entries;
};

SweepResult run_sweep(const ExperimentConfig & cfg, const std::vector<double> & gammas);

struct CompareResult
{
  int exit_code{kExitCompleted};
  std::filesystem::path report_json;
  ModeComparison comparison;
};

CompareResult run_compare(const ExperimentConfig & a, const ExperimentConfig & b);

class IoError : public Error
{
public:
  using Error::Error;
};

}  // namespace safemrac::cli

#endif  // SAFEMRAC__CLI__EXPERIMENT_HPP_
