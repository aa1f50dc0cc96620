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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "safemrac/errors.hpp"
#include "safemrac/sim.hpp"

using namespace safemrac;

namespace
{

Vector v2(double a, double b)
{
  Vector v(2);
  v << a, b;
  return v;
}

Scenario vdp_scenario(double lambda = 0.75, bool uncertainty = true)
{
  VdpParameters params;
  params.lambda = lambda;
  params.uncertainty = uncertainty;
  VdpProblem p = vdp_example(params);
  return Scenario{std::move(p.plant), std::move(p.reference), vdp_nominal(3.0, 3.0, 1.0)};
}

// The consistent-set setup: S_s level 19.2, S_r level 7.5, eps_bar 1.3.
SimConfig consistent_config(double horizon = 30.0)
{
  const Matrix P = vdp_certificate_data(3.0, 3.0, Matrix::Identity(2, 2)).P;
  SimConfig cfg;
  cfg.dt = 1e-3;
  cfg.horizon = horizon;
  cfg.x0 = v2(2.0, 2.0);
  cfg.xr0 = v2(2.0, 2.0);
  cfg.gamma = 1.0;
  cfg.bound.mode = BoundMode::constant;
  cfg.bound.eps_bar = 1.3;
  cfg.bound.safe_set = LevelSet{P, 19.2};
  cfg.bound.ref_set = LevelSet{P, 7.5};
  cfg.mode = ControllerMode::adaptive;
  cfg.W_hat0 = Matrix::Zero(4, 1);
  cfg.projection = ProjectionBounds::uniform(4, -10.0, 10.0, 0.1);
  cfg.log_stride = 10;
  return cfg;
}

}  // namespace

TEST_CASE("rk4_step examples")
{
  const OdeRhs zero = [](double, const Vector & y) {return Vector::Zero(y.size()).eval();};
  const Vector y = v2(1.5, -2.0);
  CHECK(rk4_step(zero, 0.0, y, 0.1) == y);

  const OdeRhs decay = [](double, const Vector & y) {return Vector(-y);};
  const Vector one = Vector::Ones(1);
  CHECK(rk4_step(decay, 0.0, one, 0.1)(0) == doctest::Approx(0.9048375).epsilon(1e-12));
  CHECK(std::abs(rk4_step(decay, 0.0, one, 0.1)(0) - std::exp(-0.1)) < 1e-6);

  // time argument is threaded through the stages
  const OdeRhs ramp = [](double t, const Vector &) {return Vector::Constant(1, t);};
  CHECK(rk4_step(ramp, 1.0, Vector::Zero(1), 0.5)(0) == doctest::Approx(0.625));

  CHECK_THROWS_AS(rk4_step(decay, 0.0, one, 0.0), ConfigError);
}

TEST_CASE("rk4 global order")
{
  const OdeRhs decay = [](double, const Vector & y) {return Vector(-y);};
  auto terminal_error = [&](int n) {
      Vector y = Vector::Ones(1);
      const double dt = 1.0 / n;
      for (int k = 0; k < n; ++k) {y = rk4_step(decay, k * dt, y, dt);}
      return std::abs(y(0) - std::exp(-1.0));
    };
  const double ratio = terminal_error(10) / terminal_error(20);
  CHECK(ratio >= 12.0);
  CHECK(ratio <= 20.0);
}

TEST_CASE("rk4_step reports non-finite derivatives")
{
  const OdeRhs bad = [](double t, const Vector & y) {
      return t > 0.3 ? Vector::Constant(y.size(), std::nan("")).eval() : Vector(-y);
    };
  try {
    rk4_step(bad, 0.3, Vector::Ones(1), 0.1);
    CHECK(false);
  } catch (const NumericalBlowup & ex) {
    CHECK(ex.time() > 0.3);
  }
}

TEST_CASE("closed_loop_rhs examples")
{
  SUBCASE("nominal only, exact plant, zero error stays zero")
  {
    const Scenario s = vdp_scenario(1.0, false);
    SimConfig cfg = consistent_config();
    cfg.mode = ControllerMode::nominal_only;
    for (double t : {0.0, 0.7, 3.1}) {
      Vector aug = Vector::Zero(8);
      aug.head(2) = v2(1.1, -0.4);
      aug.segment(2, 2) = v2(1.1, -0.4);
      const Vector d = closed_loop_rhs(t, aug, 1.3, s, cfg);
      CHECK((d.head(2) - d.segment(2, 2)).norm() <= 1e-14);
      CHECK(d.tail(4).isZero(0.0));
    }
  }

  SUBCASE("adaptive, e = 0 means no adaptation")
  {
    const Scenario s = vdp_scenario();
    const SimConfig cfg = consistent_config();
    Vector aug = Vector::Zero(8);
    aug.head(2) = v2(0.5, 0.3);
    aug.segment(2, 2) = v2(0.5, 0.3);
    aug.tail(4) << 0.2, -0.1, 0.4, -1.0;
    CHECK(closed_loop_rhs(1.0, aug, 1.3, s, cfg).tail(4).isZero(0.0));
  }

  SUBCASE("adaptive, W_hat = W gives the linear error dynamics")
  {
    const Scenario s = vdp_scenario();
    const SimConfig cfg = consistent_config();
    const Matrix Ae = vdp_error_matrix(3.0, 3.0);
    for (double t : {0.0, 2.0, 17.5}) {
      Vector aug(8);
      aug.head(2) = v2(0.9, 0.2);
      aug.segment(2, 2) = v2(0.7, 0.35);
      const Matrix W = ideal_weights(t, s.plant);
      aug.tail(4) = Eigen::Map<const Vector>(W.data(), 4);
      const Vector d = closed_loop_rhs(t, aug, 1.3, s, cfg);
      const Vector g = Ae * (aug.head(2) - aug.segment(2, 2));
      CHECK((d.head(2) - d.segment(2, 2) - g).norm() <= 1e-12);
    }
  }

  SUBCASE("wrong augmented size")
  {
    CHECK_THROWS_AS(
      closed_loop_rhs(0.0, Vector::Zero(7), 1.3, vdp_scenario(), consistent_config()), ConfigError);
  }
}

TEST_CASE("SimConfig validation and steps")
{
  const Scenario s = vdp_scenario();
  SimConfig cfg = consistent_config();
  CHECK(cfg.steps() == 30000);
  cfg.dt = 0.0007;
  cfg.horizon = 1.0;
  CHECK(cfg.steps() == 1429);

  cfg = consistent_config();
  cfg.gamma = -1.0;
  CHECK_THROWS_AS(cfg.validate(s), ConfigError);
  cfg = consistent_config();
  cfg.log_stride = 0;
  CHECK_THROWS_AS(cfg.validate(s), ConfigError);
  cfg = consistent_config();
  cfg.W_hat0 = Matrix::Zero(3, 1);
  CHECK_THROWS_AS(cfg.validate(s), ConfigError);
  cfg = consistent_config();
  cfg.x0 = Vector::Zero(3);
  CHECK_THROWS_AS(cfg.validate(s), ConfigError);
}

TEST_CASE("run setup errors")
{
  const Scenario s = vdp_scenario();
  SimConfig cfg = consistent_config(1.0);
  cfg.x0 = v2(3.0, 3.0);   // V(e0) = 1.6667 > k1 * 1.69
  CHECK_THROWS_AS(run(s, cfg), ConfigError);

  cfg.mode = ControllerMode::nominal_only;
  CHECK_NOTHROW(run(s, cfg));

  cfg = consistent_config(1.0);
  cfg.xr0 = v2(9.0, 9.0);
  CHECK_THROWS_AS(run(s, cfg), ConfigError);
}

TEST_CASE("adaptive run on the consistent sets stays safe")
{
  const Scenario s = vdp_scenario();
  const SimConfig cfg = consistent_config();
  const TrajectoryLog log = run(s, cfg);
  CHECK(log.summary.verdict == Verdict::completed);
  CHECK(log.summary.min_h > 0.0);
  CHECK(log.summary.min_safe_margin > 0.0);
  CHECK_FALSE(log.summary.first_safe_exit.has_value());
  CHECK(log.summary.steps_completed == 30000);
  CHECK(log.summary.min_weight_margin >= 0.0);

  REQUIRE(log.records.size() == 3001);
  CHECK(log.records.front().t == 0.0);
  CHECK(log.records.back().t == doctest::Approx(30.0));
  for (std::size_t k = 1; k < log.records.size(); ++k) {
    CHECK(log.records[k].t > log.records[k - 1].t);
    CHECK(log.records[k].t - log.records[k - 1].t == doctest::Approx(0.01).epsilon(1e-9));
    CHECK(log.records[k].h > 0.0);
    CHECK(log.records[k].V / log.records[k].h <= log.records[k].psi + 1e-12);
  }
}

TEST_CASE("nominal-only run with uncertainty leaves the safe set")
{
  const Scenario s = vdp_scenario();
  SimConfig cfg = consistent_config();
  cfg.mode = ControllerMode::nominal_only;
  const TrajectoryLog log = run(s, cfg);
  CHECK(log.summary.verdict == Verdict::safe_set_exit);
  REQUIRE(log.summary.first_safe_exit.has_value());
  CHECK(*log.summary.first_safe_exit < 30.0);
  CHECK(log.summary.min_safe_margin <= 0.0);
  for (const auto & r : log.records) {
    CHECK(r.W_hat.isZero(0.0));
  }
}

TEST_CASE("exact plant: nominal error follows the matrix exponential")
{
  const Scenario s = vdp_scenario(1.0, false);
  SimConfig cfg = consistent_config(10.0);
  cfg.mode = ControllerMode::nominal_only;
  cfg.x0 = v2(2.3, 1.6);
  const TrajectoryLog log = run(s, cfg);
  const Matrix Ae = vdp_error_matrix(3.0, 3.0);
  double worst = 0.0;
  for (const auto & r : log.records) {
    worst = std::max(worst, (r.e - oracle::expm_apply(Ae, r.t, v2(0.3, -0.4))).cwiseAbs().maxCoeff());
  }
  CHECK(worst <= 1e-6);

  SimConfig ad = consistent_config(10.0);
  ad.W_hat0 = Matrix::Zero(4, 1);
  ad.W_hat0(3, 0) = -1.0;
  const TrajectoryLog exact = run(s, ad);
  CHECK(exact.summary.verdict == Verdict::completed);
  CHECK(exact.summary.max_e_norm <= 1e-12);
}

TEST_CASE("run is deterministic and converged in dt")
{
  const Scenario s = vdp_scenario();
  SimConfig cfg = consistent_config(5.0);
  const TrajectoryLog a = run(s, cfg);
  const TrajectoryLog b = run(s, cfg);
  CHECK(a.records == b.records);

  SimConfig fine = cfg;
  fine.dt = 5e-4;
  fine.log_stride = 20;
  const TrajectoryLog c = run(s, fine);
  CHECK(c.records.size() == a.records.size());
  CHECK(std::abs(c.summary.final_e_norm - a.summary.final_e_norm) < 1e-6);
}

TEST_CASE("sweep records errors per entry")
{
  const Scenario s = vdp_scenario();
  const SimConfig cfg = consistent_config(2.0);
  const auto entries = sweep(s, cfg, {0.2, -1.0, 1.0});
  REQUIRE(entries.size() == 3);
  CHECK(entries[0].gamma == 0.2);
  CHECK(entries[0].log.has_value());
  CHECK_FALSE(entries[1].log.has_value());
  CHECK_FALSE(entries[1].error.empty());
  CHECK(entries[2].log.has_value());

  // threaded and serial results agree
  SimConfig one = cfg;
  one.gamma = 1.0;
  CHECK(entries[2].log->records == run(s, one).records);

  CHECK_THROWS(sweep(s, cfg, {}));
}

TEST_CASE("mode comparison helpers")
{
  RunSummary c, tv;
  c.max_e_norm = 0.1;
  tv.max_e_norm = 0.2;
  c.max_abs_u = 5.0;
  tv.max_abs_u = 4.0;
  c.max_eff_rate = 10.0;
  tv.max_eff_rate = 3.0;
  const ModeComparison m = compare_summaries(c, tv);
  CHECK(m.complete);
  CHECK(m.constant_tracks_closer);
  CHECK(m.constant_uses_more_control);
  CHECK(m.time_varying_rate_lower);
  CHECK(m.delta_e_norm == doctest::Approx(-0.1));

  tv.verdict = Verdict::barrier_breach;
  CHECK_FALSE(compare_summaries(c, tv).complete);

  SimConfig a = consistent_config(1.0), b = consistent_config(1.0);
  b.bound.mode = BoundMode::time_varying;
  CHECK_NOTHROW(require_same_except_bound(a, b));
  b.gamma = 2.0;
  CHECK_THROWS_AS(require_same_except_bound(a, b), ConfigError);
}

TEST_CASE("verdict strings")
{
  for (Verdict v : {Verdict::completed, Verdict::barrier_breach, Verdict::reference_escape,
      Verdict::safe_set_exit, Verdict::numerical_blowup})
  {
    CHECK(verdict_from_string(to_string(v)) == v);
  }
  CHECK_THROWS(verdict_from_string("fine"));
}
