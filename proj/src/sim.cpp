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

#include "safemrac/sim.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <thread>

#include "safemrac/errors.hpp"

namespace safemrac
{

namespace
{

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct Layout
{
  Eigen::Index n;
  Eigen::Index m;
  Eigen::Index p;   // s + m

  Eigen::Index size() const {return 2 * n + p * m;}
};

Layout layout_of(const Scenario & scenario)
{
  const Eigen::Index m = scenario.plant.input_dim();
  return {scenario.plant.state_dim(), m, scenario.plant.uncertainty.basis_dim + m};
}

Matrix weights_of(const Vector & aug, const Layout & L)
{
  return Eigen::Map<const Matrix>(aug.data() + 2 * L.n, L.p, L.m);
}

bool same(const Matrix & a, const Matrix & b)
{
  return a.rows() == b.rows() && a.cols() == b.cols() && a == b;
}

}  // namespace

std::size_t SimConfig::steps() const
{
  return static_cast<std::size_t>(std::llround(horizon / dt));
}

void SimConfig::validate(const Scenario & scenario) const
{
  scenario.plant.validate();
  if (!scenario.reference.drift || !scenario.reference.command || !scenario.nominal.law) {
    throw ConfigError("scenario has an unset reference or nominal law");
  }
  const Layout L = layout_of(scenario);
  if (!(dt > 0.0) || !std::isfinite(dt)) {
    throw ConfigError("dt must be positive");
  }
  if (!(horizon > 0.0) || !std::isfinite(horizon)) {
    throw ConfigError("horizon must be positive");
  }
  if (steps() == 0) {
    throw ConfigError("horizon shorter than one step");
  }
  if (!(gamma > 0.0) || !std::isfinite(gamma)) {
    throw ConfigError("gamma must be positive");
  }
  if (log_stride == 0) {
    throw ConfigError("log_stride must be positive");
  }
  if (x0.size() != L.n || xr0.size() != L.n) {
    throw ConfigError("x0 and xr0 must have the plant state dimension");
  }
  if (W_hat0.rows() != L.p || W_hat0.cols() != L.m) {
    throw ConfigError(
            "W_hat0 must be " + std::to_string(L.p) + "x" + std::to_string(L.m));
  }
  projection.validate();
  if (projection.theta_min.size() != L.p) {
    throw ConfigError("projection bounds must have length s + m");
  }
  for (Eigen::Index j = 0; j < L.m; ++j) {
    if (!projection.contains(W_hat0.col(j))) {
      throw ConfigError("W_hat0 must lie inside the projection hypercube");
    }
  }
  bound.safe_set.validate();
  if (bound.safe_set.shape.rows() != L.n) {
    throw ConfigError("safe set dimension differs from state dimension");
  }
  if (bound.ref_set) {
    bound.ref_set->validate();
  }
  if (bound.mode == BoundMode::constant && !(bound.eps_bar > 0.0)) {
    throw ConfigError("constant performance bound eps_bar must be positive");
  }
}

std::string to_string(Verdict v)
{
  switch (v) {
    case Verdict::completed: return "completed";
    case Verdict::barrier_breach: return "barrier_breach";
    case Verdict::reference_escape: return "reference_escape";
    case Verdict::safe_set_exit: return "safe_set_exit";
    case Verdict::numerical_blowup: return "numerical_blowup";
  }
  return "unknown";
}

Verdict verdict_from_string(const std::string & s)
{
  for (Verdict v : {Verdict::completed, Verdict::barrier_breach, Verdict::reference_escape,
      Verdict::safe_set_exit, Verdict::numerical_blowup})
  {
    if (to_string(v) == s) {
      return v;
    }
  }
  throw ConfigError("unknown verdict '" + s + "'");
}

Vector rk4_step(const OdeRhs & rhs, double t, const Vector & y, double dt)
{
  if (!(dt > 0.0)) {
    throw ConfigError("rk4_step: dt must be positive");
  }
  auto checked = [](Vector v, double at) {
      if (!v.allFinite()) {
        throw NumericalBlowup(at);
      }
      return v;
    };
  const double half = 0.5 * dt;
  const Vector k1 = checked(rhs(t, y), t);
  const Vector k2 = checked(rhs(t + half, y + half * k1), t + half);
  const Vector k3 = checked(rhs(t + half, y + half * k2), t + half);
  const Vector k4 = checked(rhs(t + dt, y + dt * k3), t + dt);
  return checked(y + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4), t + dt);
}

Vector closed_loop_rhs(
  double t, const Vector & aug, double eps, const Scenario & scenario, const SimConfig & cfg)
{
  const Layout L = layout_of(scenario);
  if (aug.size() != L.size()) {
    throw ConfigError("closed_loop_rhs: augmented state has wrong size");
  }
  const Vector x = aug.segment(0, L.n);
  const Vector xr = aug.segment(L.n, L.n);
  const Vector c = scenario.reference.command(t);
  const Vector sigma = regressor(x, xr, c, scenario.nominal, scenario.plant.uncertainty.basis);

  Vector out(L.size());
  Vector u;
  if (cfg.mode == ControllerMode::nominal_only) {
    u = sigma.tail(L.m);
    out.tail(L.p * L.m).setZero();
  } else {
    const Matrix W = weights_of(aug, L);
    u = control(W, sigma);
    const Matrix dW = update_rhs(
      W, sigma, x - xr, t, eps, scenario.nominal.certificate, cfg.gamma,
      scenario.plant.input_map, cfg.projection);
    out.tail(L.p * L.m) = Eigen::Map<const Vector>(dW.data(), dW.size());
  }
  out.segment(0, L.n) = plant_rhs(t, x, u, scenario.plant);
  out.segment(L.n, L.n) = reference_rhs(t, xr, scenario.reference);
  return out;
}

TrajectoryLog run(const Scenario & scenario, const SimConfig & cfg)
{
  cfg.validate(scenario);
  const Layout L = layout_of(scenario);
  const Certificate & cert = scenario.nominal.certificate;
  const bool adaptive = cfg.mode == ControllerMode::adaptive;

  double eps0;
  try {
    eps0 = performance_bound_at(0.0, cfg.xr0, cfg.bound);
  } catch (const ReferenceEscape &) {
    throw ConfigError("initial reference state lies outside the safe set");
  }
  if (adaptive && !(cert.lyap(cfg.x0 - cfg.xr0) < cert.k1 * eps0 * eps0)) {
    throw ConfigError(
            "initial error violates V(e0) < k1 eps(0)^2; the safety guarantee requires e0 in D_t");
  }

  TrajectoryLog log;
  log.state_dim = L.n;
  log.input_dim = L.m;
  log.regressor_dim = L.p;
  log.dt = cfg.dt;
  log.log_stride = cfg.log_stride;

  RunSummary & sum = log.summary;
  sum.min_h = sum.min_safe_margin = sum.min_eps = sum.min_weight_margin =
    std::numeric_limits<double>::infinity();

  Vector y(L.size());
  y << cfg.x0, cfg.xr0, Eigen::Map<const Vector>(cfg.W_hat0.data(), cfg.W_hat0.size());

  const std::size_t steps = cfg.steps();
  bool terminated = false;

  for (std::size_t i = 0; i <= steps; ++i) {
    const double t = static_cast<double>(i) * cfg.dt;

    LogRecord rec;
    rec.t = t;
    rec.x = y.segment(0, L.n);
    rec.xr = y.segment(L.n, L.n);
    rec.W_hat = y.tail(L.p * L.m);
    const Matrix W = weights_of(y, L);

    try {
      rec.eps = performance_bound_at(t, rec.xr, cfg.bound);
    } catch (const ReferenceEscape & ex) {
      sum.verdict = Verdict::reference_escape;
      sum.event_time = t;
      sum.message = ex.what();
      terminated = true;
      break;
    }

    rec.e = rec.x - rec.xr;
    rec.e_norm = rec.e.norm();
    rec.V = cert.lyap(rec.e);
    rec.h = cert.k1 * rec.eps * rec.eps - rec.V;
    const Vector c = scenario.reference.command(t);
    const Vector sigma = regressor(rec.x, rec.xr, c, scenario.nominal,
        scenario.plant.uncertainty.basis);
    rec.u_n = sigma.tail(L.m);
    rec.u = adaptive ? control(W, sigma) : rec.u_n;
    if (rec.h > 0.0) {
      rec.eff_rate = cfg.gamma * (rec.h + rec.V) / (rec.h * rec.h);
      rec.psi = energy_diagnostic(rec.e, W, t, scenario.plant, cert, cfg.gamma, rec.eps);
    } else {
      rec.eff_rate = kNaN;
      rec.psi = kNaN;
    }
    rec.safe_margin = in_safe_set(rec.x, cfg.bound.safe_set).margin;

    sum.min_h = std::min(sum.min_h, rec.h);
    sum.max_e_norm = std::max(sum.max_e_norm, rec.e_norm);
    sum.final_e_norm = rec.e_norm;
    sum.max_abs_u = std::max(sum.max_abs_u, rec.u.cwiseAbs().maxCoeff());
    if (rec.h > 0.0) {
      sum.max_eff_rate = std::max(sum.max_eff_rate, rec.eff_rate);
      sum.max_psi = std::max(sum.max_psi, rec.psi);
    }
    sum.min_safe_margin = std::min(sum.min_safe_margin, rec.safe_margin);
    sum.min_eps = std::min(sum.min_eps, rec.eps);
    for (Eigen::Index j = 0; j < L.m; ++j) {
      const double margin = std::min(
        (W.col(j) - cfg.projection.theta_min).minCoeff(),
        (cfg.projection.theta_max - W.col(j)).minCoeff());
      sum.min_weight_margin = std::min(sum.min_weight_margin, margin);
    }
    if (!(rec.safe_margin > 0.0) && !sum.first_safe_exit) {
      sum.first_safe_exit = t;
    }
    if (!(rec.h > 0.0) && !sum.first_barrier_violation) {
      sum.first_barrier_violation = t;
    }

    const bool breach_now = adaptive && !(rec.h > 0.0);
    if (i % cfg.log_stride == 0 || breach_now) {
      log.records.push_back(rec);
    }
    if (breach_now) {
      sum.verdict = Verdict::barrier_breach;
      sum.event_time = t;
      sum.message = BarrierBreach(t, rec.h).what();
      terminated = true;
      break;
    }
    if (i == steps) {
      break;
    }

    const double eps = rec.eps;
    const OdeRhs rhs = [&](double tau, const Vector & state) {
        return closed_loop_rhs(tau, state, eps, scenario, cfg);
      };
    try {
      y = rk4_step(rhs, t, y, cfg.dt);
    } catch (const BarrierBreach & ex) {
      sum.verdict = Verdict::barrier_breach;
      sum.event_time = ex.time();
      sum.message = ex.what();
      terminated = true;
    } catch (const NumericalBlowup & ex) {
      sum.verdict = Verdict::numerical_blowup;
      sum.event_time = ex.time();
      sum.message = ex.what();
      terminated = true;
    } catch (const DomainError & ex) {
      sum.verdict = Verdict::numerical_blowup;
      sum.event_time = t;
      sum.message = ex.what();
      terminated = true;
    }
    if (terminated) {
      break;
    }
    sum.steps_completed = i + 1;
  }

  if (!terminated) {
    sum.verdict = Verdict::completed;
  }
  // A blowup after the state already left the safe set is reported as the safety event.
  if (sum.first_safe_exit &&
    (sum.verdict == Verdict::completed || sum.verdict == Verdict::numerical_blowup))
  {
    if (sum.verdict == Verdict::numerical_blowup) {
      sum.message += "; state left the safe set first";
    }
    sum.verdict = Verdict::safe_set_exit;
  }
  return log;
}

std::vector<SweepEntry> sweep(
  const Scenario & scenario, const SimConfig & base, const std::vector<double> & gammas)
{
  if (gammas.empty()) {
    throw ConfigError("sweep needs at least one gamma");
  }
  std::vector<SweepEntry> out(gammas.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
      for (std::size_t k = next++; k < gammas.size(); k = next++) {
        out[k].gamma = gammas[k];
        SimConfig cfg = base;
        cfg.gamma = gammas[k];
        try {
          out[k].log = run(scenario, cfg);
        } catch (const std::exception & ex) {
          out[k].error = ex.what();
        }
      }
    };

  const std::size_t n_workers = std::min<std::size_t>(
    gammas.size(), std::max(1u, std::thread::hardware_concurrency()));
  std::vector<std::thread> pool;
  for (std::size_t w = 1; w < n_workers; ++w) {
    pool.emplace_back(worker);
  }
  worker();
  for (auto & th : pool) {
    th.join();
  }
  return out;
}

void require_same_except_bound(const SimConfig & a, const SimConfig & b)
{
  const bool agree = a.dt == b.dt && a.horizon == b.horizon && same(a.x0, b.x0) &&
    same(a.xr0, b.xr0) && a.gamma == b.gamma && a.mode == b.mode && same(a.W_hat0, b.W_hat0) &&
    same(a.projection.theta_min, b.projection.theta_min) &&
    same(a.projection.theta_max, b.projection.theta_max) &&
    a.projection.nu == b.projection.nu && a.log_stride == b.log_stride &&
    same(a.bound.safe_set.shape, b.bound.safe_set.shape) &&
    a.bound.safe_set.level == b.bound.safe_set.level;
  if (!agree) {
    throw ConfigError("compare_modes: configurations differ in more than the performance bound");
  }
}

ModeComparison compare_summaries(const RunSummary & constant, const RunSummary & time_varying)
{
  ModeComparison cmp;
  cmp.constant = constant;
  cmp.time_varying = time_varying;
  cmp.complete = constant.verdict == Verdict::completed &&
    time_varying.verdict == Verdict::completed;
  cmp.delta_e_norm = constant.max_e_norm - time_varying.max_e_norm;
  cmp.delta_abs_u = constant.max_abs_u - time_varying.max_abs_u;
  cmp.delta_eff_rate = constant.max_eff_rate - time_varying.max_eff_rate;
  if (cmp.complete) {
    cmp.constant_tracks_closer = cmp.delta_e_norm < 0.0;
    cmp.constant_uses_more_control = cmp.delta_abs_u > 0.0;
    cmp.time_varying_rate_lower = cmp.delta_eff_rate > 0.0;
  }
  return cmp;
}

ModeComparison compare_modes(
  const Scenario & scenario, const SimConfig & cfg_constant, const SimConfig & cfg_time_varying)
{
  require_same_except_bound(cfg_constant, cfg_time_varying);
  return compare_summaries(
    run(scenario, cfg_constant).summary, run(scenario, cfg_time_varying).summary);
}

}  // namespace safemrac
