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

#ifndef SAFEMRAC__SIM_HPP_
#define SAFEMRAC__SIM_HPP_

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "safemrac/adapt.hpp"
#include "safemrac/certify.hpp"
#include "safemrac/model.hpp"
#include "safemrac/safety.hpp"

namespace safemrac
{

/// Everything a run needs besides its numeric configuration.
struct Scenario
{
  PlantModel plant;
  ReferenceModel reference;
  NominalController nominal;
};

enum class ControllerMode { nominal_only, adaptive };

struct SimConfig
{
  double dt{1e-3};
  double horizon{30.0};
  Vector x0;
  Vector xr0;
  double gamma{1.0};
  PerformanceBound bound;
  ControllerMode mode{ControllerMode::adaptive};
  Matrix W_hat0;                 // (s + m) x m
  ProjectionBounds projection;   // length s + m, applied columnwise
  std::size_t log_stride{10};

  std::size_t steps() const;

  /// Dimension and sign checks against the scenario. Throws ConfigError.
  void validate(const Scenario & scenario) const;
};

enum class Verdict { completed, barrier_breach, reference_escape, safe_set_exit, numerical_blowup };

std::string to_string(Verdict v);
Verdict verdict_from_string(const std::string & s);

struct LogRecord
{
  double t{0.0};
  Vector x;
  Vector xr;
  Vector e;
  double e_norm{0.0};
  double V{0.0};
  double h{0.0};
  double eps{0.0};
  Vector u;
  Vector u_n;
  double psi{0.0};
  double eff_rate{0.0};
  double safe_margin{0.0};
  Vector W_hat;   // column-major flattening

  bool operator==(const LogRecord &) const = default;
};

struct RunSummary
{
  Verdict verdict{Verdict::completed};
  std::optional<double> event_time;        // time of the terminating event
  std::optional<double> first_safe_exit;   // first t with x^T P x >= level
  std::optional<double> first_barrier_violation;   // nominal-only runs: first t with h <= 0
  double min_h{0.0};
  double max_e_norm{0.0};
  double final_e_norm{0.0};
  double max_abs_u{0.0};
  double max_eff_rate{0.0};
  double max_psi{0.0};
  double min_safe_margin{0.0};
  double min_eps{0.0};
  /// Smallest signed distance of any weight estimate entry to the faces of
  /// Omega (negative when outside).
  double min_weight_margin{0.0};
  std::size_t steps_completed{0};
  std::string message;
};

/// Logged samples plus the run summary. Augmented state layout is
/// [x (n); xr (n); W_hat column-major ((s + m) m)].
struct TrajectoryLog
{
  Eigen::Index state_dim{0};
  Eigen::Index input_dim{0};
  Eigen::Index regressor_dim{0};
  double dt{0.0};
  std::size_t log_stride{1};
  std::vector<LogRecord> records;
  RunSummary summary;
};

using OdeRhs = std::function<Vector(double, const Vector &)>;

/// Classical fourth-order Runge-Kutta. Throws NumericalBlowup on a
/// non-finite stage derivative.
Vector rk4_step(const OdeRhs & rhs, double t, const Vector & y, double dt);

/// Time derivative of the augmented state. `eps` is the performance bound
/// held over the current step.
Vector closed_loop_rhs(
  double t, const Vector & aug, double eps, const Scenario & scenario, const SimConfig & cfg);

TrajectoryLog run(const Scenario & scenario, const SimConfig & cfg);

struct SweepEntry
{
  double gamma{0.0};
  std::optional<TrajectoryLog> log;
  std::string error;   // non-empty when the run threw before producing a log
};

/// Runs every gamma independently (concurrently); output order equals input order.
std::vector<SweepEntry> sweep(
  const Scenario & scenario, const SimConfig & base, const std::vector<double> & gammas);

struct ModeComparison
{
  RunSummary constant;
  RunSummary time_varying;
  bool complete{false};
  bool constant_tracks_closer{false};      // sup |e| smaller in constant mode
  bool constant_uses_more_control{false};  // sup |u| larger in constant mode
  bool time_varying_rate_lower{false};     // sup effective rate lower in time-varying mode
  double delta_e_norm{0.0};                // constant minus time-varying
  double delta_abs_u{0.0};
  double delta_eff_rate{0.0};
};

/// Orders the two summaries; the claim flags are set only when both runs completed.
ModeComparison compare_summaries(const RunSummary & constant, const RunSummary & time_varying);

/// Throws ConfigError unless the configurations agree on everything but the bound.
void require_same_except_bound(const SimConfig & a, const SimConfig & b);

/// Runs both configurations, which must agree on everything but the bound.
ModeComparison compare_modes(
  const Scenario & scenario, const SimConfig & cfg_constant, const SimConfig & cfg_time_varying);

}  // namespace safemrac

#endif  // SAFEMRAC__SIM_HPP_
