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
#include <random>

#include "safemrac/adapt.hpp"
#include "safemrac/certify.hpp"
#include "safemrac/errors.hpp"

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

Matrix vdp_P()
{
  Matrix P(2, 2);
  P << 29.0 / 24.0, 1.0 / 8.0, 1.0 / 8.0, 5.0 / 24.0;
  return P;
}

Matrix D_vdp() {return vec({0.0, 1.0});}

}  // namespace

TEST_CASE("proj examples")
{
  const ProjectionBounds b = ProjectionBounds::uniform(3, -1.0, 1.0, 0.1);
  const Vector y = vec({5.0, -2.0, 0.7});

  CHECK(proj(vec({0.0, 0.5, -0.5}), y, b) == y);

  const Vector at_max = proj(vec({1.0, 0.0, 0.0}), y, b);
  CHECK(at_max(0) == 0.0);
  CHECK(at_max(1) == -2.0);

  const Vector layer = proj(vec({0.95, 0.0, 0.0}), vec({2.0, 0.0, 0.0}), b);
  CHECK(layer(0) == doctest::Approx(1.0).epsilon(1e-12));

  // pointing back into the box is never attenuated
  CHECK(proj(vec({0.95, -0.95, 0.0}), vec({-3.0, 3.0, 0.0}), b) == vec({-3.0, 3.0, 0.0}));

  const Vector low = proj(vec({-0.97, 0.0, 0.0}), vec({-1.0, 0.0, 0.0}), b);
  CHECK(low(0) == doctest::Approx(-0.3).epsilon(1e-12));
}

TEST_CASE("proj errors and bounds validation")
{
  const ProjectionBounds b = ProjectionBounds::uniform(2, -1.0, 1.0, 0.1);
  CHECK_THROWS_AS(proj(vec({1.5, 0.0}), vec({1.0, 1.0}), b), DomainError);
  CHECK_THROWS_AS(proj(vec({0.0}), vec({1.0, 1.0}), b), ConfigError);
  CHECK_NOTHROW(proj(vec({1.0 + 1e-10, 0.0}), vec({1.0, 1.0}), b));
  CHECK_THROWS_AS(ProjectionBounds::uniform(2, -1.0, 1.0, 0.0), ConfigError);
  CHECK_THROWS_AS(ProjectionBounds::uniform(2, -1.0, 1.0, 1.0), ConfigError);
  CHECK(b.contains_interior(vec({0.9, -0.9})));
  CHECK_FALSE(b.contains_interior(vec({0.95, 0.0})));
}

TEST_CASE("projection inequality on random triples")
{
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const Eigen::Index n = 4;
  int checked = 0;
  for (int k = 0; k < 20000; ++k) {
    ProjectionBounds b;
    b.nu = 0.05 + 0.2 * u(rng);
    b.theta_min = Vector::Constant(n, -1.0 - 2.0 * u(rng));
    b.theta_max = Vector::Constant(n, 1.0 + 2.0 * u(rng));
    Vector theta(n), theta_star(n), y(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      const double lo = b.theta_min(i), hi = b.theta_max(i);
      // bias toward the boundary layers where the operator is active
      const double r = u(rng);
      theta(i) = r < 0.4 ? hi - b.nu * u(rng) : (r < 0.8 ? lo + b.nu * u(rng) : lo + (hi - lo) * u(rng));
      theta_star(i) = lo + b.nu + (hi - lo - 2.0 * b.nu) * u(rng);
      y(i) = 10.0 * (u(rng) - 0.5);
    }
    const double lhs = (theta - theta_star).dot(proj(theta, y, b) - y);
    CHECK(lhs <= 1e-12);
    ++checked;
  }
  CHECK(checked == 20000);
}

TEST_CASE("proj_m is columnwise")
{
  const ProjectionBounds b = ProjectionBounds::uniform(2, -1.0, 1.0, 0.1);
  Matrix Theta(2, 2), Y(2, 2);
  Theta << 1.0, 0.0, 0.0, -1.0;
  Y << 4.0, 2.0, 3.0, -5.0;
  const Matrix out = proj_m(Theta, Y, b);
  CHECK(out(0, 0) == 0.0);
  CHECK(out(1, 0) == 3.0);
  CHECK(out(0, 1) == 2.0);
  CHECK(out(1, 1) == 0.0);

  const Matrix single = proj_m(Theta.col(0), Y.col(0), b);
  CHECK(single.col(0) == proj(Theta.col(0), Y.col(0), b));
  CHECK_THROWS_AS(proj_m(Theta, Y.col(0), b), ConfigError);
}

TEST_CASE("regressor and control")
{
  const NominalController nom = vdp_nominal(3.0, 3.0, 1.0);
  auto basis = [](const Vector & x) {return vec({x(0), x(0) * x(1), x(0) * x(1) * x(1)});};
  const Vector c0 = Vector::Zero(1);

  const Vector s0 = regressor(Vector::Zero(2), Vector::Zero(2), c0, nom, basis);
  CHECK(s0.size() == 4);
  CHECK(s0.isZero(0.0));

  const Vector s22 = regressor(vec({2, 2}), vec({2, 2}), c0, nom, basis);
  CHECK((s22 - vec({2, 4, 8, -6})).norm() <= 1e-12);

  CHECK(control(Matrix::Zero(4, 1), s22)(0) == 0.0);
  Matrix w = Matrix::Zero(4, 1);
  w(3, 0) = -1.0;
  CHECK(control(w, s22)(0) == doctest::Approx(-6.0));
  CHECK_THROWS_AS(control(Matrix::Zero(3, 1), s22), ConfigError);
}

TEST_CASE("barrier")
{
  const Certificate cert = vdp_nominal(3.0, 3.0, 1.0).certificate;
  const BarrierEvaluation b = barrier(0.0, Vector::Zero(2), 1.3, cert, 2.0);
  CHECK(b.h == doctest::Approx(0.326077).epsilon(1e-5));
  CHECK(b.h == doctest::Approx(cert.k1 * 1.69));
  CHECK(b.V == 0.0);
  CHECK(b.effective_rate == doctest::Approx(2.0 / (cert.k1 * 1.69)));

  // a point on the level set V = k1 eps^2 along the top eigenvector
  const SymmetricEigen es = symmetric_eigen(vdp_P());
  const Vector e = std::sqrt(cert.k1 * 1.69 / es.values(1)) * es.vectors.col(1);
  CHECK_THROWS_AS(barrier(1.5, 1.0000001 * e, 1.3, cert, 1.0), BarrierBreach);
  try {
    barrier(1.5, 2.0 * e, 1.3, cert, 1.0);
  } catch (const BarrierBreach & ex) {
    CHECK(ex.time() == 1.5);
    CHECK(ex.h() < 0.0);
  }
}

TEST_CASE("update_rhs")
{
  const Certificate cert = vdp_nominal(3.0, 3.0, 1.0).certificate;
  const ProjectionBounds b = ProjectionBounds::uniform(4, -10.0, 10.0, 0.5);
  const Vector sigma = vec({2, 4, 8, -6});
  const Matrix W = Matrix::Zero(4, 1);

  CHECK(update_rhs(W, sigma, Vector::Zero(2), 0.0, 1.3, cert, 1.0, D_vdp(), b).isZero(0.0));

  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  int reduced = 0;
  for (int k = 0; k < 2000; ++k) {
    const double eps = 1.0 + u(rng) * 0.5;
    const double gamma = 0.05 + 5.0 * std::abs(u(rng));
    const Vector e = 0.3 * vec({u(rng), u(rng)});
    const double V = e.dot(vdp_P() * e);
    const double h = cert.k1 * eps * eps - V;
    if (!(h > 0.0)) {continue;}
    Vector sg(4);
    for (int i = 0; i < 4; ++i) {sg(i) = 5.0 * u(rng);}
    Matrix Wh(4, 1);
    for (int i = 0; i < 4; ++i) {Wh(i, 0) = 9.8 * u(rng);}

    // written out by hand: grad V = 2 P e, h + V = k1 eps^2
    const double ePD = e.dot(vdp_P() * D_vdp().col(0));
    const Matrix direct = 2.0 * gamma *
      proj_m(Wh, sg * (cert.k1 * eps * eps * ePD) / (h * h), b);
    const Matrix got = update_rhs(Wh, sg, e, 0.0, eps, cert, gamma, D_vdp(), b);
    CHECK((got - direct).cwiseAbs().maxCoeff() <= 1e-12 * (1.0 + direct.cwiseAbs().maxCoeff()));
    ++reduced;
  }
  CHECK(reduced > 1000);
}

TEST_CASE("ideal weights and energy")
{
  VdpParameters params;
  const VdpProblem p = vdp_example(params);
  const Certificate cert = vdp_nominal(3.0, 3.0, 1.0).certificate;

  const Matrix W = ideal_weights(0.0, p.plant);
  CHECK(W.rows() == 4);
  CHECK(W(0, 0) == doctest::Approx(0.0));
  CHECK(W(1, 0) == doctest::Approx(0.3 / 0.75));
  CHECK(W(2, 0) == doctest::Approx(1.0 / 0.75));
  CHECK(W(3, 0) == doctest::Approx(-1.0 / 0.75));

  CHECK(energy_diagnostic(Vector::Zero(2), W, 0.0, p.plant, cert, 1.0, 1.3) == 0.0);

  const Vector wt = vec({0.1, -0.2, 0.3, 0.4});
  const double psi = energy_diagnostic(Vector::Zero(2), W + wt, 0.0, p.plant, cert, 1.0, 1.3);
  CHECK(psi == doctest::Approx(0.375 * wt.squaredNorm()).epsilon(1e-12));

  // V / h never exceeds psi
  const Vector e = vec({0.1, 0.05});
  const BarrierEvaluation be = barrier(0.0, e, 1.3, cert, 1.0);
  CHECK(be.V / be.h <= energy_diagnostic(e, W + wt, 0.0, p.plant, cert, 1.0, 1.3));
}

TEST_CASE("matching condition: W_hat = W removes the uncertainty")
{
  const VdpProblem p = vdp_example();
  const NominalController nom = vdp_nominal(3.0, 3.0, 1.0);
  const Matrix Ae = vdp_error_matrix(3.0, 3.0);
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (int k = 0; k < 200; ++k) {
    const double t = 5.0 * (u(rng) + 2.0);
    const Vector x = vec({u(rng), u(rng)});
    const Vector xr = vec({u(rng), u(rng)});
    const Vector c = p.reference.command(t);
    const Vector sigma = regressor(x, xr, c, nom, p.plant.uncertainty.basis);
    const Vector uu = control(ideal_weights(t, p.plant), sigma);
    const Vector de = plant_rhs(t, x, uu, p.plant) - reference_rhs(t, xr, p.reference);
    CHECK((de - Ae * (x - xr)).norm() <= 1e-12 * (1.0 + x.squaredNorm() * x.norm()));
  }
}
