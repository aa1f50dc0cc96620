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
#include <numbers>
#include <random>

#include "safemrac/errors.hpp"
#include "safemrac/model.hpp"

using namespace safemrac;

namespace
{

Vector vec(std::initializer_list<double> v)
{
  Vector out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double d : v) {out(i++) = d;}
  return out;
}

}  // namespace

TEST_CASE("plant_rhs on the Van der Pol plant")
{
  const VdpProblem p = vdp_example();
  const Vector u0 = Vector::Zero(1);

  CHECK(plant_rhs(0.0, vec({0, 0}), u0, p.plant).isZero(0.0));

  const Vector a = plant_rhs(0.0, vec({1, 0}), u0, p.plant);
  CHECK(a(0) == doctest::Approx(0.0));
  CHECK(a(1) == doctest::Approx(-1.0));

  // F = (1, -1), delta = 0.3 cos(0) * 1 + 1 = 1.3
  const Vector b = plant_rhs(0.0, vec({1, 1}), u0, p.plant);
  CHECK(b(0) == doctest::Approx(1.0));
  CHECK(b(1) == doctest::Approx(0.3));
}

TEST_CASE("plant_rhs rejects mismatched dimensions")
{
  const VdpProblem p = vdp_example();
  CHECK_THROWS_AS(plant_rhs(0.0, vec({1, 2, 3}), Vector::Zero(1), p.plant), ConfigError);
  CHECK_THROWS_AS(plant_rhs(0.0, vec({1, 2}), Vector::Zero(2), p.plant), ConfigError);
}

TEST_CASE("uncertainty_eval")
{
  const VdpProblem p = vdp_example();
  const Uncertainty & unc = p.plant.uncertainty;
  for (double t : {0.0, 1.7, 42.0}) {
    CHECK(uncertainty_eval(t, vec({0, 0}), unc)(0) == 0.0);
  }
  CHECK(uncertainty_eval(0.0, vec({2, 2}), unc)(0) == doctest::Approx(9.2));
  // 0.1 t = pi / 2
  const double t = std::numbers::pi / 0.2;
  CHECK(uncertainty_eval(t, vec({1, 0}), unc)(0) == doctest::Approx(0.3));
}

TEST_CASE("reference_rhs of the forced Van der Pol oscillator")
{
  const VdpProblem p = vdp_example();
  CHECK(reference_rhs(0.0, vec({0, 0}), p.reference).isZero(0.0));
  const Vector a = reference_rhs(0.0, vec({2, 2}), p.reference);
  CHECK(a(0) == doctest::Approx(2.0));
  CHECK(a(1) == doctest::Approx(-8.0));
  const Vector b = reference_rhs(std::numbers::pi / 2, vec({0, 0}), p.reference);
  CHECK(b(0) == doctest::Approx(0.0));
  CHECK(b(1) == doctest::Approx(1.2));
}

TEST_CASE("vdp_example parameters")
{
  const VdpProblem p = vdp_example();
  CHECK(p.plant.control_effectiveness(0, 0) == 0.75);
  CHECK(p.reference.command(0.0)(0) == 0.0);
  const Vector s = p.plant.uncertainty.basis(vec({1, 2}));
  CHECK(s(0) == 1.0);
  CHECK(s(1) == 2.0);
  CHECK(s(2) == 4.0);
  CHECK(p.plant.drift(Vector::Zero(2)).isZero(0.0));

  VdpParameters off;
  off.uncertainty = false;
  off.lambda = 1.0;
  const VdpProblem q = vdp_example(off);
  CHECK(uncertainty_eval(3.0, vec({2, -1}), q.plant.uncertainty)(0) == 0.0);
  CHECK(q.plant.uncertainty.basis_dim == 3);
}

TEST_CASE("PlantModel::validate")
{
  VdpProblem p = vdp_example();
  CHECK_NOTHROW(p.plant.validate());

  PlantModel bad = p.plant;
  bad.control_effectiveness(0, 0) = -0.5;
  CHECK_THROWS_AS(bad.validate(), ConfigError);

  bad = p.plant;
  bad.control_effectiveness = Matrix::Identity(2, 2);
  CHECK_THROWS_AS(bad.validate(), ConfigError);

  bad = p.plant;
  bad.uncertainty.basis_dim = 2;
  CHECK_THROWS_AS(bad.validate(), ConfigError);

  bad = p.plant;
  bad.uncertainty.true_weights = [](double) {return Matrix::Zero(3, 2).eval();};
  CHECK_THROWS_AS(bad.validate(), ConfigError);
}

TEST_CASE("control enters linearly through D Lambda")
{
  const VdpProblem p = vdp_example();
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> d(-3.0, 3.0);
  for (int k = 0; k < 500; ++k) {
    const double t = 10.0 * std::abs(d(rng));
    const Vector x = vec({d(rng), d(rng)});
    const Vector u = vec({d(rng)});
    const Vector diff = plant_rhs(t, x, u, p.plant) - plant_rhs(t, x, Vector::Zero(1), p.plant);
    const Vector expected = p.plant.input_map * p.plant.control_effectiveness * u;
    CHECK((diff - expected).norm() <= 1e-12 * (1.0 + expected.norm()));
    // first component is x2 regardless of u and t
    CHECK(plant_rhs(t, x, u, p.plant)(0) == x(1));
  }
}

TEST_CASE("true weights are bounded by 0.3, 0.3, 1")
{
  const VdpProblem p = vdp_example();
  for (double t = 0.0; t < 100.0; t += 0.37) {
    const Matrix w = p.plant.uncertainty.true_weights(t);
    CHECK(std::abs(w(0, 0)) <= 0.3);
    CHECK(std::abs(w(1, 0)) <= 0.3);
    CHECK(w(2, 0) == 1.0);
  }
}
