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

// Command-line front end: run, sweep, compare, verify, figures.

#include <cstdlib>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "safemrac/cli/experiment.hpp"
#include "safemrac/cli/figures.hpp"
#include "safemrac/cli/self_check.hpp"
#include "safemrac/errors.hpp"

namespace
{

using namespace safemrac;
using namespace safemrac::cli;

std::vector<double> parse_gammas(const std::string & text)
{
  std::vector<double> out;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception &) {
      used = 0;
    }
    if (used == 0 || used != item.size()) {
      throw ConfigError("--gammas: '" + item + "' is not a number");
    }
    out.push_back(v);
  }
  return out;
}

void print_summary(const std::string & name, const RunSummary & s)
{
  std::cout << name << ": " << to_string(s.verdict) << "  min h " << s.min_h << "  sup|e| " <<
    s.max_e_norm << "  sup|u| " << s.max_abs_u << "  max rate " << s.max_eff_rate << "\n";
  if (s.first_safe_exit) {
    std::cout << "  left the safe set at t = " << *s.first_safe_exit << "\n";
  }
  if (!s.message.empty()) {
    std::cout << "  " << s.message << "\n";
  }
}

}  // namespace

int main(int argc, char ** argv)
{
  CLI::App app{"Safety-critical model reference adaptive control simulator"};
  app.require_subcommand(1);

  std::string run_config;
  auto * run_cmd = app.add_subcommand("run", "Run one experiment");
  run_cmd->add_option("config", run_config, "Experiment config (JSON)")->required();

  std::string sweep_config;
  std::string gammas_text;
  auto * sweep_cmd = app.add_subcommand("sweep", "Run an experiment for several adaptation rates");
  sweep_cmd->add_option("config", sweep_config, "Experiment config (JSON)")->required();
  sweep_cmd->add_option("--gammas", gammas_text, "Comma-separated adaptation rates")->required();

  std::string cmp_a;
  std::string cmp_b;
  auto * cmp_cmd = app.add_subcommand("compare", "Compare constant and time-varying bounds");
  cmp_cmd->add_option("config_a", cmp_a, "First config")->required();
  cmp_cmd->add_option("config_b", cmp_b, "Second config")->required();

  auto * verify_cmd = app.add_subcommand("verify", "Run built-in certificate and geometry checks");

  std::string fig_input;
  std::string fig_id;
  std::string fig_config;
  std::string fig_out;
  auto * fig_cmd = app.add_subcommand("figures", "Emit a gnuplot script from logged results");
  fig_cmd->add_option("input", fig_input, "Summary JSON or trajectory CSV")->required();
  fig_cmd->add_option("--figure", fig_id, "Figure id")->required();
  fig_cmd->add_option("--config", fig_config, "Config providing the set geometry");
  fig_cmd->add_option("--out", fig_out, "Output directory (default: next to the input)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError & e) {
    const int code = app.exit(e);
    return code == 0 ? kExitCompleted : kExitConfigError;
  }

  try {
    if (*run_cmd) {
      const ExperimentResult res = run_experiment(load_config(run_config));
      print_summary(run_config, res.log.summary);
      std::cout << "wrote " << res.trajectory_csv.string() << "\n      " <<
        res.summary_json.string() << "\n";
      for (const auto & p : res.figure_scripts) {
        std::cout << "      " << p.string() << "\n";
      }
      return res.exit_code;
    }
    if (*sweep_cmd) {
      const SweepResult res = run_sweep(load_config(sweep_config), parse_gammas(gammas_text));
      for (const auto & entry : res.entries) {
        const std::string name = "gamma=" + std::to_string(entry.gamma);
        if (entry.log) {
          print_summary(name, entry.log->summary);
        } else {
          std::cout << name << ": error: " << entry.error << "\n";
        }
      }
      std::cout << "wrote " << res.summary_json.string() << "\n";
      return res.exit_code;
    }
    if (*cmp_cmd) {
      const CompareResult res = run_compare(load_config(cmp_a), load_config(cmp_b));
      const ModeComparison & c = res.comparison;
      print_summary("constant", c.constant);
      print_summary("time-varying", c.time_varying);
      std::cout << std::boolalpha << "complete: " << c.complete <<
        "\nconstant bound tracks closer: " << c.constant_tracks_closer <<
        "\nconstant bound uses more control: " << c.constant_uses_more_control <<
        "\ntime-varying bound has lower effective rate: " << c.time_varying_rate_lower <<
        "\nwrote " << res.report_json.string() << "\n";
      return res.exit_code;
    }
    if (*verify_cmd) {
      bool all = true;
      for (const auto & check : run_self_checks()) {
        std::cout << (check.passed ? "[PASS] " : "[FAIL] ") << check.name << ": " <<
          check.detail << "\n";
        all = all && check.passed;
      }
      return all ? kExitCompleted : kExitConfigError;
    }
    if (*fig_cmd) {
      std::optional<std::filesystem::path> cfg_path;
      if (!fig_config.empty()) {
        cfg_path = fig_config;
      }
      const std::filesystem::path input(fig_input);
      const FigureContext ctx = load_figure_context(input, cfg_path);
      std::filesystem::path dir = input.parent_path();
      if (const char * env = std::getenv("SAFEMRAC_OUT"); env != nullptr && *env != '\0') {
        dir = env;
      }
      if (!fig_out.empty()) {
        dir = fig_out;
      }
      if (dir.empty()) {
        dir = ".";
      }
      std::filesystem::create_directories(dir);
      const FigureFiles files = emit_figure_script(ctx, fig_id, dir, input.stem().string());
      std::cout << "wrote " << files.data_csv.string() << "\n      " << files.script.string() <<
        "\n";
      return kExitCompleted;
    }
  } catch (const NumericalBlowup & e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitBlowup;
  } catch (const std::exception & e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfigError;
  }
  return kExitConfigError;
}
