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

#include "safemrac/cli/self_check.hpp"

#include <cmath>
#include <cstdio>
#include <numbers>
#include <random>

#include "safemrac/adapt.hpp"
#include "safemrac/certify.hpp"
#include "safemrac/safety.hpp"
#include "safemrac/sim.hpp"

namespace safemrac::cli
{

namespace
{

std::string fmt(const char * pattern, double a, double b = 0.0)
{
  char buf[160];
  std::snprintf(buf, sizeof(buf), pattern, a, b);
  return buf;
}

double sampled_boundary_distance(const Vector & x, const LevelSet & set, int samples)
{
  const SymmetricEigen eig = symmetric_eigen(set.shape);
  const Matrix inv_sqrt = eig.vectors *
    eig.values.cwiseSqrt().cwiseInverse().asDiagonal() * eig.vectors.transpose();
  double best = std::numeric_limits<double>::infinity();
  for (int k = 0; k < samples; ++k) {
    const double th = 2.0 * std::numbers::pi * k / samples;
    const Vector y = std::sqrt(set.level) * (inv_sqrt * Eigen::Vector2d(std::cos(th), std::sin(th)));
    best = std::min(best, (x - y).norm());
  }
  return best;
}

}  // namespace

std::vector<CheckResult> run_self_checks()
{
  std::vector<CheckResult> out;
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);

  const QuadraticCertificateData data = vdp_certificate_data(3.0, 3.0, Matrix::Identity(2, 2));
  {
    Matrix expected(2, 2);
    expected << 29.0 / 24.0, 1.0 / 8.0, 1.0 / 8.0, 5.0 / 24.0;
    const double err = (data.P - expected).cwiseAbs().maxCoeff();
    const double res = lyapunov_residual(data);
    out.push_back({"lyapunov solve", err <= 1e-10 && res <= 1e-10,
        fmt("max entry error %.3g, residual %.3g", err, res)});
  }
  {
    const Certificate cert = quadratic_certificate(data);
    const Matrix Ae = data.Ae;
    const CertificateReport rep = verify_certificate(
      cert, [&Ae](const Vector & e) -> Vector {return Ae * e;}, 2, 2.0, 10000);
    out.push_back({"certificate sandwich and decay", rep.ok(),
        fmt("violations %.0f, worst decay margin %.3g",
        static_cast<double>(rep.violations), rep.worst_decay)});
  }
  {
    double worst = 0.0;
    for (int k = 0; k < 20; ++k) {
      Matrix A(2, 2);
      A << unit(rng), unit(rng), unit(rng), unit(rng);
      const Matrix P = A * A.transpose() + 0.2 * Matrix::Identity(2, 2);
      const LevelSet set{P, 1.0 + std::abs(unit(rng))};
      Vector x(2);
      do {
        x << 2.0 * unit(rng), 2.0 * unit(rng);
      } while (!in_safe_set(x, set).inside);
      worst = std::max(worst,
          std::abs(dist_point_to_boundary(x, set) - sampled_boundary_distance(x, set, 200000)));
    }
    out.push_back({"point-to-boundary distance vs sampling", worst <= 1e-4,
        fmt("worst deviation %.3g over 20 instances", worst)});
  }
  {
    const LevelSet inner{data.P, 2.8};
    const LevelSet outer{data.P, 3.2};
    const double closed = dist_between_level_sets(inner, outer);
    double sampled = std::numeric_limits<double>::infinity();
    const SymmetricEigen eig = symmetric_eigen(data.P);
    const Matrix inv_sqrt = eig.vectors *
      eig.values.cwiseSqrt().cwiseInverse().asDiagonal() * eig.vectors.transpose();
    for (int k = 0; k < 20000; ++k) {
      const double th = 2.0 * std::numbers::pi * k / 20000;
      const Vector y = std::sqrt(inner.level) *
        (inv_sqrt * Eigen::Vector2d(std::cos(th), std::sin(th)));
      sampled = std::min(sampled, dist_point_to_boundary(y, outer));
    }
    out.push_back({"level-set gap vs sampling", std::abs(closed - sampled) <= 1e-4,
        fmt("closed form %.8f, sampled %.8f", closed, sampled)});
  }
  {
    const ProjectionBounds b = ProjectionBounds::uniform(4, -1.0, 1.0, 0.1);
    std::uniform_real_distribution<double> in_omega(-1.0, 1.0);
    std::uniform_real_distribution<double> in_inner(-0.9, 0.9);
    double worst = -std::numeric_limits<double>::infinity();
    for (int k = 0; k < 10000; ++k) {
      Vector theta(4), star(4), y(4);
      for (int i = 0; i < 4; ++i) {
        theta(i) = in_omega(rng);
        star(i) = in_inner(rng);
        y(i) = 10.0 * unit(rng);
      }
      worst = std::max(worst, (theta - star).dot(proj(theta, y, b) - y));
    }
    out.push_back({"projection inequality", worst <= 1e-12,
        fmt("largest inner product %.3g", worst)});
  }
  {
    const OdeRhs decay = [](double, const Vector & y) -> Vector {return -y;};
    auto terminal_error = [&](int steps) {
        Vector y = Vector::Ones(1);
        const double h = 1.0 / steps;
        for (int i = 0; i < steps; ++i) {
          y = rk4_step(decay, i * h, y, h);
        }
        return std::abs(y(0) - std::exp(-1.0));
      };
    const double ratio = terminal_error(10) / terminal_error(20);
    out.push_back({"rk4 convergence order", ratio >= 12.0 && ratio <= 20.0,
        fmt("error ratio under step halving %.3f", ratio)});
  }
  return out;
}

}  // namespace safemrac::cli
