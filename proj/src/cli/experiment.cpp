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

#include "safemrac/cli/experiment.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "safemrac/cli/figures.hpp"
#include "safemrac/cli/trajectory_csv.hpp"
#include "safemrac/errors.hpp"

namespace safemrac::cli
{

using nlohmann::json;

namespace
{

[[noreturn]] void bad_key(const std::string & key, const std::string & why)
{
  throw ConfigError("invalid value for key '" + key + "': " + why);
}

double get_number(const json & v, const std::string & key)
{
  if (!v.is_number()) {
    bad_key(key, "expected a number");
  }
  return v.get<double>();
}

std::vector<double> get_vector(const json & v, const std::string & key)
{
  if (!v.is_array()) {
    bad_key(key, "expected an array of numbers");
  }
  std::vector<double> out;
  for (const auto & item : v) {
    out.push_back(get_number(item, key));
  }
  return out;
}

std::vector<std::vector<double>> get_matrix(const json & v, const std::string & key)
{
  if (!v.is_array()) {
    bad_key(key, "expected an array of rows");
  }
  std::vector<std::vector<double>> out;
  for (const auto & row : v) {
    out.push_back(get_vector(row, key));
  }
  return out;
}

std::string get_string(const json & v, const std::string & key)
{
  if (!v.is_string()) {
    bad_key(key, "expected a string");
  }
  return v.get<std::string>();
}

using Setter = std::function<void (ExperimentConfig &, const json &, const std::string &)>;

const std::map<std::string, Setter> & setters()
{
  static const std::map<std::string, Setter> table{
    {"name", [](auto & c, const json & v, const auto & k) {c.name = get_string(v, k);}},
    {"output_dir", [](auto & c, const json & v, const auto & k) {c.output_dir = get_string(v, k);}},
    {"figures", [](auto & c, const json & v, const auto & k) {
        if (!v.is_array()) {bad_key(k, "expected an array of figure ids");}
        c.figures.clear();
        for (const auto & item : v) {c.figures.push_back(get_string(item, k));}
      }},
    {"dt", [](auto & c, const json & v, const auto & k) {c.dt = get_number(v, k);}},
    {"horizon", [](auto & c, const json & v, const auto & k) {c.horizon = get_number(v, k);}},
    {"x0", [](auto & c, const json & v, const auto & k) {c.x0 = get_vector(v, k);}},
    {"xr0", [](auto & c, const json & v, const auto & k) {c.xr0 = get_vector(v, k);}},
    {"gamma", [](auto & c, const json & v, const auto & k) {c.gamma = get_number(v, k);}},
    {"controller_mode",
      [](auto & c, const json & v, const auto & k) {c.controller_mode = get_string(v, k);}},
    {"bound_mode", [](auto & c, const json & v, const auto & k) {c.bound_mode = get_string(v, k);}},
    {"eps_bar", [](auto & c, const json & v, const auto & k) {c.eps_bar = get_number(v, k);}},
    {"eps_bar_source",
      [](auto & c, const json & v, const auto & k) {c.eps_bar_source = get_string(v, k);}},
    {"Ss_level", [](auto & c, const json & v, const auto & k) {c.ss_level = get_number(v, k);}},
    {"Sr_level", [](auto & c, const json & v, const auto & k) {c.sr_level = get_number(v, k);}},
    {"R", [](auto & c, const json & v, const auto & k) {c.R = get_matrix(v, k);}},
    {"l1", [](auto & c, const json & v, const auto & k) {c.l1 = get_number(v, k);}},
    {"l2", [](auto & c, const json & v, const auto & k) {c.l2 = get_number(v, k);}},
    {"mu", [](auto & c, const json & v, const auto & k) {c.mu = get_number(v, k);}},
    {"command_amplitude",
      [](auto & c, const json & v, const auto & k) {c.command_amplitude = get_number(v, k);}},
    {"uncertainty", [](auto & c, const json & v, const auto & k) {
        if (!v.is_boolean()) {bad_key(k, "expected true or false");}
        c.uncertainty = v.get<bool>();
      }},
    {"lambda", [](auto & c, const json & v, const auto & k) {c.lambda = get_number(v, k);}},
    {"W_hat0", [](auto & c, const json & v, const auto & k) {c.W_hat0 = get_matrix(v, k);}},
    {"theta_min", [](auto & c, const json & v, const auto & k) {c.theta_min = get_number(v, k);}},
    {"theta_max", [](auto & c, const json & v, const auto & k) {c.theta_max = get_number(v, k);}},
    {"nu", [](auto & c, const json & v, const auto & k) {c.nu = get_number(v, k);}},
    {"log_stride", [](auto & c, const json & v, const auto & k) {
        if (!v.is_number_integer() || v.get<long long>() <= 0) {
          bad_key(k, "expected a positive integer");
        }
        c.log_stride = v.get<std::size_t>();
      }},
  };
  return table;
}

Matrix to_matrix(const std::vector<std::vector<double>> & rows)
{
  const auto r = static_cast<Eigen::Index>(rows.size());
  const auto c = r ? static_cast<Eigen::Index>(rows.front().size()) : 0;
  Matrix out(r, c);
  for (Eigen::Index i = 0; i < r; ++i) {
    for (Eigen::Index j = 0; j < c; ++j) {
      out(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
    }
  }
  return out;
}

Vector to_vector(const std::vector<double> & v)
{
  return Eigen::Map<const Vector>(v.data(), static_cast<Eigen::Index>(v.size()));
}

bool finite_all(const std::vector<double> & v)
{
  for (double d : v) {
    if (!std::isfinite(d)) {return false;}
  }
  return true;
}

void require_positive(double v, const std::string & key)
{
  if (!(v > 0.0) || !std::isfinite(v)) {
    bad_key(key, "must be a positive finite number");
  }
}

json optional_number(const std::optional<double> & v)
{
  return v ? json(*v) : json(nullptr);
}

/// JSON cannot hold NaN or infinity; such values are written as null.
json finite_or_null(double v)
{
  return std::isfinite(v) ? json(v) : json(nullptr);
}

std::string gamma_tag(double gamma)
{
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%g", gamma);
  return buf;
}

void prepare_directory(const std::filesystem::path & dir)
{
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) {
    throw IoError("cannot create output directory '" + dir.string() + "': " + ec.message());
  }
  const auto probe = dir / ".safemrac_write_probe";
  {
    std::ofstream out(probe);
    if (!out) {
      throw IoError("output directory '" + dir.string() + "' is not writable");
    }
  }
  std::filesystem::remove(probe, ec);
}

void write_json(const std::filesystem::path & path, const json & j)
{
  std::ofstream out(path, std::ios::binary);
  if (!out || !(out << j.dump(2) << '\n')) {
    throw IoError("cannot write '" + path.string() + "'");
  }
}

FigureContext figure_context(const SimConfig & sim)
{
  FigureContext ctx;
  ctx.safe_set = sim.bound.safe_set;
  ctx.ref_set = sim.bound.ref_set;
  return ctx;
}

std::vector<std::filesystem::path> emit_selected(
  const ExperimentConfig & cfg, const FigureContext & ctx,
  const std::filesystem::path & dir, const std::string & stem)
{
  std::vector<std::filesystem::path> scripts;
  for (const auto & id : cfg.figures) {
    scripts.push_back(emit_figure_script(ctx, id, dir, stem).script);
  }
  return scripts;
}

int severity(int code)
{
  switch (code) {
    case kExitConfigError: return 3;
    case kExitBlowup: return 2;
    case kExitSafetyEvent: return 1;
    default: return 0;
  }
}

int worst(int a, int b)
{
  return severity(a) >= severity(b) ? a : b;
}

json assumption4_report(const TrajectoryLog & log, const ExperimentConfig & cfg, double alpha1)
{
  json out = {{"checked", false}, {"violations", 0}, {"first_violation_t", nullptr}};
  if (cfg.bound_mode != "time_varying" || log.records.size() < 3) {
    return out;
  }
  std::vector<double> eps;
  eps.reserve(log.records.size());
  for (const auto & r : log.records) {
    if (r.t != static_cast<double>(eps.size() * cfg.log_stride) * cfg.dt) {
      break;   // trailing event sample off the uniform grid
    }
    eps.push_back(r.eps);
  }
  if (eps.size() < 3) {
    return out;
  }
  const auto violations = assumption4_monitor(
    eps, cfg.dt * static_cast<double>(cfg.log_stride), alpha1);
  out["checked"] = true;
  out["violations"] = violations.size();
  if (!violations.empty()) {
    out["first_violation_t"] = violations.front().t;
  }
  return out;
}

}  // namespace

void validate(const ExperimentConfig & cfg)
{
  if (cfg.name.empty() || cfg.name.find_first_of("/\\") != std::string::npos) {
    bad_key("name", "must be a non-empty file-name-safe string");
  }
  if (cfg.output_dir.empty()) {
    bad_key("output_dir", "must not be empty");
  }
  for (const auto & id : cfg.figures) {
    const auto & ids = figure_ids();
    if (std::find(ids.begin(), ids.end(), id) == ids.end()) {
      bad_key("figures", "unknown figure id '" + id + "'");
    }
  }
  require_positive(cfg.dt, "dt");
  require_positive(cfg.horizon, "horizon");
  if (cfg.horizon < cfg.dt) {
    bad_key("horizon", "must cover at least one step");
  }
  if (cfg.x0.size() != 2 || !finite_all(cfg.x0)) {
    bad_key("x0", "expected two finite numbers");
  }
  if (cfg.xr0.size() != 2 || !finite_all(cfg.xr0)) {
    bad_key("xr0", "expected two finite numbers");
  }
  require_positive(cfg.gamma, "gamma");
  if (cfg.controller_mode != "adaptive" && cfg.controller_mode != "nominal_only") {
    bad_key("controller_mode", "expected 'adaptive' or 'nominal_only'");
  }
  if (cfg.bound_mode != "constant" && cfg.bound_mode != "time_varying") {
    bad_key("bound_mode", "expected 'constant' or 'time_varying'");
  }
  if (cfg.eps_bar_source != "literal" && cfg.eps_bar_source != "reference_set_distance") {
    bad_key("eps_bar_source", "expected 'literal' or 'reference_set_distance'");
  }
  require_positive(cfg.eps_bar, "eps_bar");
  require_positive(cfg.ss_level, "Ss_level");
  require_positive(cfg.sr_level, "Sr_level");
  if (!(cfg.sr_level < cfg.ss_level)) {
    bad_key("Sr_level", "the reference set must be strictly inside the safe set (Sr_level < Ss_level)");
  }
  if (cfg.R.size() != 2 || cfg.R[0].size() != 2 || cfg.R[1].size() != 2 ||
    !is_spd(to_matrix(cfg.R)))
  {
    bad_key("R", "expected a symmetric positive-definite 2x2 matrix");
  }
  require_positive(cfg.l1, "l1");
  require_positive(cfg.l2, "l2");
  if (!std::isfinite(cfg.mu)) {
    bad_key("mu", "must be finite");
  }
  if (!std::isfinite(cfg.command_amplitude)) {
    bad_key("command_amplitude", "must be finite");
  }
  require_positive(cfg.lambda, "lambda");
  if (cfg.W_hat0.size() != 4) {
    bad_key("W_hat0", "expected 4 rows (basis size 3 plus one input)");
  }
  for (const auto & row : cfg.W_hat0) {
    if (row.size() != 1 || !finite_all(row)) {
      bad_key("W_hat0", "expected one finite number per row");
    }
    if (row[0] < cfg.theta_min || row[0] > cfg.theta_max) {
      bad_key("W_hat0", "entries must lie within [theta_min, theta_max]");
    }
  }
  require_positive(cfg.nu, "nu");
  if (!std::isfinite(cfg.theta_min) || !std::isfinite(cfg.theta_max) ||
    !(cfg.theta_min + 2.0 * cfg.nu < cfg.theta_max))
  {
    bad_key("theta_max", "projection bounds need theta_min + 2 nu < theta_max");
  }
  if (cfg.log_stride == 0) {
    bad_key("log_stride", "must be a positive integer");
  }
}

ExperimentConfig config_from_json(const json & j)
{
  if (!j.is_object()) {
    throw ConfigError("configuration must be a JSON object");
  }
  ExperimentConfig cfg;
  const auto & table = setters();
  for (const auto & [key, value] : j.items()) {
    const auto it = table.find(key);
    if (it == table.end()) {
      throw ConfigError("unknown configuration key '" + key + "'");
    }
    it->second(cfg, value, key);
  }
  validate(cfg);
  return cfg;
}

ExperimentConfig parse_config(const std::string & text)
{
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error & ex) {
    std::size_t line = 1;
    std::size_t col = 1;
    const std::size_t upto = std::min<std::size_t>(ex.byte > 0 ? ex.byte - 1 : 0, text.size());
    for (std::size_t i = 0; i < upto; ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    throw ConfigError(
            "JSON parse error at line " + std::to_string(line) + ", column " +
            std::to_string(col) + ": " + ex.what());
  }
  return config_from_json(j);
}

ExperimentConfig load_config(const std::filesystem::path & path)
{
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw ConfigError("cannot open configuration '" + path.string() + "'");
  }
  std::ostringstream text;
  text << in.rdbuf();
  try {
    return parse_config(text.str());
  } catch (const ConfigError & ex) {
    throw ConfigError(path.string() + ": " + ex.what());
  }
}

json config_to_json(const ExperimentConfig & cfg)
{
  return json{
    {"name", cfg.name},
    {"output_dir", cfg.output_dir},
    {"figures", cfg.figures},
    {"dt", cfg.dt},
    {"horizon", cfg.horizon},
    {"x0", cfg.x0},
    {"xr0", cfg.xr0},
    {"gamma", cfg.gamma},
    {"controller_mode", cfg.controller_mode},
    {"bound_mode", cfg.bound_mode},
    {"eps_bar", cfg.eps_bar},
    {"eps_bar_source", cfg.eps_bar_source},
    {"Ss_level", cfg.ss_level},
    {"Sr_level", cfg.sr_level},
    {"R", cfg.R},
    {"l1", cfg.l1},
    {"l2", cfg.l2},
    {"mu", cfg.mu},
    {"command_amplitude", cfg.command_amplitude},
    {"uncertainty", cfg.uncertainty},
    {"lambda", cfg.lambda},
    {"W_hat0", cfg.W_hat0},
    {"theta_min", cfg.theta_min},
    {"theta_max", cfg.theta_max},
    {"nu", cfg.nu},
    {"log_stride", cfg.log_stride},
  };
}

Scenario build_scenario(const ExperimentConfig & cfg)
{
  VdpParameters params;
  params.mu = cfg.mu;
  params.lambda = cfg.lambda;
  params.command_amplitude = cfg.command_amplitude;
  params.uncertainty = cfg.uncertainty;
  VdpProblem problem = vdp_example(params);
  return Scenario{
    std::move(problem.plant), std::move(problem.reference),
    vdp_nominal(cfg.l1, cfg.l2, cfg.mu, to_matrix(cfg.R))};
}

SimConfig build_sim_config(const ExperimentConfig & cfg, const Scenario & scenario)
{
  const QuadraticCertificateData data = vdp_certificate_data(cfg.l1, cfg.l2, to_matrix(cfg.R));

  SimConfig sim;
  sim.dt = cfg.dt;
  sim.horizon = cfg.horizon;
  sim.x0 = to_vector(cfg.x0);
  sim.xr0 = to_vector(cfg.xr0);
  sim.gamma = cfg.gamma;
  sim.mode = cfg.controller_mode == "adaptive" ? ControllerMode::adaptive :
    ControllerMode::nominal_only;
  sim.bound.mode = cfg.bound_mode == "constant" ? BoundMode::constant : BoundMode::time_varying;
  sim.bound.safe_set = LevelSet{data.P, cfg.ss_level};
  sim.bound.ref_set = LevelSet{data.P, cfg.sr_level};
  sim.bound.eps_bar = cfg.eps_bar_source == "literal" ? cfg.eps_bar :
    dist_between_level_sets(*sim.bound.ref_set, sim.bound.safe_set);
  sim.W_hat0 = to_matrix(cfg.W_hat0);
  const Eigen::Index p = scenario.plant.uncertainty.basis_dim + scenario.plant.input_dim();
  sim.projection = ProjectionBounds::uniform(p, cfg.theta_min, cfg.theta_max, cfg.nu);
  sim.log_stride = cfg.log_stride;
  return sim;
}

std::vector<std::string> setup_notes(const ExperimentConfig & cfg)
{
  const Scenario scenario = build_scenario(cfg);
  const SimConfig sim = build_sim_config(cfg, scenario);
  std::vector<std::string> notes;
  const auto & safe = sim.bound.safe_set;
  const auto & ref = *sim.bound.ref_set;
  if (!in_safe_set(sim.x0, safe).inside) {
    notes.push_back(
      "x0 lies outside the safe set (x0^T P x0 = " +
      std::to_string(sim.x0.dot(safe.shape * sim.x0)) + " >= " + std::to_string(safe.level) + ")");
  }
  if (!in_safe_set(sim.xr0, ref).inside) {
    notes.push_back("xr0 lies outside the reference set");
  }
  const double gap = dist_between_level_sets(ref, safe);
  if (sim.bound.mode == BoundMode::constant && sim.bound.eps_bar > gap) {
    notes.push_back(
      "eps_bar = " + std::to_string(sim.bound.eps_bar) +
      " exceeds dist(S_r, boundary of S_s) = " + std::to_string(gap) +
      "; safety of x does not follow from |e| < eps_bar alone");
  }
  return notes;
}

int exit_code_for(Verdict verdict)
{
  switch (verdict) {
    case Verdict::completed: return kExitCompleted;
    case Verdict::numerical_blowup: return kExitBlowup;
    default: return kExitSafetyEvent;
  }
}

std::filesystem::path output_directory(const ExperimentConfig & cfg)
{
  if (const char * env = std::getenv("SAFEMRAC_OUT"); env != nullptr && *env != '\0') {
    return env;
  }
  return cfg.output_dir;
}

json summary_to_json(const RunSummary & s)
{
  return json{
    {"verdict", to_string(s.verdict)},
    {"event_time", optional_number(s.event_time)},
    {"first_safe_exit", optional_number(s.first_safe_exit)},
    {"first_barrier_violation", optional_number(s.first_barrier_violation)},
    {"min_h", finite_or_null(s.min_h)},
    {"sup_e_norm", finite_or_null(s.max_e_norm)},
    {"final_e_norm", finite_or_null(s.final_e_norm)},
    {"sup_abs_u", finite_or_null(s.max_abs_u)},
    {"max_eff_rate", finite_or_null(s.max_eff_rate)},
    {"max_psi", finite_or_null(s.max_psi)},
    {"min_safe_margin", finite_or_null(s.min_safe_margin)},
    {"min_eps", finite_or_null(s.min_eps)},
    {"min_weight_margin", finite_or_null(s.min_weight_margin)},
    {"steps_completed", s.steps_completed},
    {"message", s.message},
  };
}

ExperimentResult run_experiment(const ExperimentConfig & cfg)
{
  validate(cfg);
  const Scenario scenario = build_scenario(cfg);
  const SimConfig sim = build_sim_config(cfg, scenario);
  const auto dir = output_directory(cfg);
  prepare_directory(dir);

  const auto start = std::chrono::steady_clock::now();
  ExperimentResult result;
  result.log = run(scenario, sim);
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  result.trajectory_csv = dir / (cfg.name + "_trajectory.csv");
  write_trajectory_csv(result.trajectory_csv, result.log);

  FigureContext ctx = figure_context(sim);
  ctx.traces.push_back({"gamma=" + gamma_tag(cfg.gamma), result.log});
  result.figure_scripts = emit_selected(cfg, ctx, dir, cfg.name);

  result.exit_code = exit_code_for(result.log.summary.verdict);

  json summary = summary_to_json(result.log.summary);
  summary["name"] = cfg.name;
  summary["kind"] = "run";
  summary["exit_code"] = result.exit_code;
  summary["timing"] = {{"wall_seconds", wall}, {"steps", sim.steps()}, {"dt", sim.dt}};
  summary["eps_bar"] = sim.bound.eps_bar;
  summary["eps_bar_source"] = cfg.eps_bar_source;
  summary["setup_notes"] = setup_notes(cfg);
  summary["assumption4"] =
    assumption4_report(result.log, cfg, scenario.nominal.certificate.alpha1);
  summary["traces"] = json::array(
    {{{"label", ctx.traces.front().label},
      {"csv", result.trajectory_csv.filename().string()}}});
  json scripts = json::array();
  for (const auto & p : result.figure_scripts) {
    scripts.push_back(p.filename().string());
  }
  summary["figure_scripts"] = scripts;
  summary["config"] = config_to_json(cfg);

  result.summary_json = dir / (cfg.name + "_summary.json");
  write_json(result.summary_json, summary);
  return result;
}

SweepResult run_sweep(const ExperimentConfig & cfg, const std::vector<double> & gammas)
{
  validate(cfg);
  if (gammas.empty()) {
    throw ConfigError("sweep needs at least one gamma");
  }
  for (double g : gammas) {
    if (!(g > 0.0) || !std::isfinite(g)) {
      throw ConfigError("invalid value for key 'gammas': every gamma must be positive");
    }
  }
  const Scenario scenario = build_scenario(cfg);
  const SimConfig sim = build_sim_config(cfg, scenario);
  const auto dir = output_directory(cfg);
  prepare_directory(dir);

  SweepResult result;
  result.entries = sweep(scenario, sim, gammas);

  FigureContext ctx = figure_context(sim);
  json runs = json::array();
  json traces = json::array();
  int code = kExitCompleted;
  for (const auto & entry : result.entries) {
    json item = {{"gamma", entry.gamma}};
    if (!entry.log) {
      item["error"] = entry.error;
      code = worst(code, kExitConfigError);
    } else {
      item.update(summary_to_json(entry.log->summary));
      const auto csv = dir / (cfg.name + "_gamma_" + gamma_tag(entry.gamma) + "_trajectory.csv");
      write_trajectory_csv(csv, *entry.log);
      const std::string label = "gamma=" + gamma_tag(entry.gamma);
      traces.push_back({{"label", label}, {"csv", csv.filename().string()}});
      item["csv"] = csv.filename().string();
      ctx.traces.push_back({label, *entry.log});
      code = worst(code, exit_code_for(entry.log->summary.verdict));
    }
    runs.push_back(item);
  }
  std::vector<std::filesystem::path> scripts;
  if (!ctx.traces.empty()) {
    scripts = emit_selected(cfg, ctx, dir, cfg.name + "_sweep");
  }
  result.exit_code = code;

  json summary = {
    {"name", cfg.name}, {"kind", "sweep"}, {"exit_code", code}, {"runs", runs},
    {"traces", traces}, {"eps_bar", sim.bound.eps_bar}, {"setup_notes", setup_notes(cfg)},
    {"config", config_to_json(cfg)}};
  json script_names = json::array();
  for (const auto & p : scripts) {
    script_names.push_back(p.filename().string());
  }
  summary["figure_scripts"] = script_names;
  result.summary_json = dir / (cfg.name + "_sweep_summary.json");
  write_json(result.summary_json, summary);
  return result;
}

CompareResult run_compare(const ExperimentConfig & a, const ExperimentConfig & b)
{
  validate(a);
  validate(b);
  ExperimentConfig a_core = a;
  ExperimentConfig b_core = b;
  for (ExperimentConfig * c : {&a_core, &b_core}) {
    c->name.clear();
    c->output_dir.clear();
    c->figures.clear();
    c->bound_mode.clear();
    c->eps_bar = 0.0;
    c->eps_bar_source.clear();
  }
  if (!(a_core == b_core)) {
    throw ConfigError(
            "compare: configurations may differ only in name, output_dir, figures, bound_mode, "
            "eps_bar and eps_bar_source");
  }

  const Scenario scenario = build_scenario(a);
  const SimConfig sim_a = build_sim_config(a, scenario);
  const SimConfig sim_b = build_sim_config(b, scenario);
  require_same_except_bound(sim_a, sim_b);
  const auto dir = output_directory(a);
  prepare_directory(dir);

  const TrajectoryLog log_a = run(scenario, sim_a);
  const TrajectoryLog log_b = run(scenario, sim_b);

  // compare_summaries expects (constant, time-varying); keep the caller's order otherwise.
  const bool swapped = sim_a.bound.mode == BoundMode::time_varying &&
    sim_b.bound.mode == BoundMode::constant;
  CompareResult result;
  result.comparison = swapped ? compare_summaries(log_b.summary, log_a.summary) :
    compare_summaries(log_a.summary, log_b.summary);

  const std::string stem = a.name + "_vs_" + b.name;
  FigureContext ctx = figure_context(sim_a);
  json traces = json::array();
  for (const auto & [cfg, log] : {std::pair{&a, &log_a}, std::pair{&b, &log_b}}) {
    const auto csv = dir / (stem + "_" + cfg->name + "_trajectory.csv");
    write_trajectory_csv(csv, *log);
    const std::string label = cfg->name + " (" + cfg->bound_mode + ")";
    traces.push_back({{"label", label}, {"csv", csv.filename().string()}});
    ctx.traces.push_back({label, *log});
  }
  const auto scripts = emit_selected(a, ctx, dir, stem);

  const ModeComparison & cmp = result.comparison;
  int code = worst(exit_code_for(log_a.summary.verdict), exit_code_for(log_b.summary.verdict));
  result.exit_code = code;

  json report = {
    {"kind", "compare"},
    {"exit_code", code},
    {"complete", cmp.complete},
    {"constant", summary_to_json(cmp.constant)},
    {"time_varying", summary_to_json(cmp.time_varying)},
    {"claims", {
        {"constant_tracks_closer", cmp.constant_tracks_closer},
        {"constant_uses_more_control", cmp.constant_uses_more_control},
        {"time_varying_rate_lower", cmp.time_varying_rate_lower}}},
    {"deltas", {
        {"sup_e_norm", cmp.delta_e_norm},
        {"sup_abs_u", cmp.delta_abs_u},
        {"max_eff_rate", cmp.delta_eff_rate}}},
    {"traces", traces},
    {"config", config_to_json(a)},
    {"config_b", config_to_json(b)}};
  json script_names = json::array();
  for (const auto & p : scripts) {
    script_names.push_back(p.filename().string());
  }
  report["figure_scripts"] = script_names;
  result.report_json = dir / (stem + "_comparison.json");
  write_json(result.report_json, report);
  return result;
}

}  // namespace safemrac::cli
