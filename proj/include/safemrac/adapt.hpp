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

#ifndef SAFEMRAC__ADAPT_HPP_
#define SAFEMRAC__ADAPT_HPP_

#include <functional>

#include "safemrac/certify.hpp"
#include "safemrac/model.hpp"

namespace safemrac
{

/// Hypercube Omega = [theta_min, theta_max] with boundary layer width nu.
/// The inner cube Omega_nu shrinks every side by nu.
struct ProjectionBounds
{
  Vector theta_min;
  Vector theta_max;
  double nu{0.1};

  static ProjectionBounds uniform(Eigen::Index dim, double lo, double hi, double nu);

  /// theta_min + 2 nu < theta_max componentwise and nu > 0.
  void validate() const;
  bool contains(const Vector & theta, double slack = 0.0) const;
  bool contains_interior(const Vector & theta) const;   // Omega_nu
};

struct AdaptiveState
{
  Matrix W_hat;            // (s + m) x m
  double gamma{1.0};
  ProjectionBounds bounds;
  double barrier_k1{1.0};
};

struct BarrierEvaluation
{
  double h{0.0};
  double V{0.0};
  double eps{0.0};
  double effective_rate{0.0};   // gamma (h + V) / h^2
};

/// Slack by which theta may sit outside Omega before proj() reports corruption.
/// RK4 stage points can overshoot the cube by rounding-level amounts.
inline constexpr double kProjectionSlack = 1e-9;

/// Componentwise projection operator.
Vector proj(
  const Vector & theta, const Vector & y, const ProjectionBounds & bounds,
  double slack = kProjectionSlack);

/// Column-by-column projection of p x m matrices; the bounds have length p.
Matrix proj_m(
  const Matrix & Theta, const Matrix & Y, const ProjectionBounds & bounds,
  double slack = kProjectionSlack);

/// sigma = [sigma_p(x); u_n(x, xr, c)].
Vector regressor(
  const Vector & x, const Vector & xr, const Vector & c,
  const NominalController & nominal,
  const std::function<Vector(const Vector &)> & basis);

/// u = -W_hat^T sigma.
Vector control(const Matrix & W_hat, const Vector & sigma);

/// h = k1 eps^2 - V(e). Throws BarrierBreach when h <= 0.
BarrierEvaluation barrier(
  double t, const Vector & e, double eps, const Certificate & cert, double gamma);

/// gamma Proj_m(W_hat, ((h + V) / h^2) sigma grad V(e)^T D).
Matrix update_rhs(
  const Matrix & W_hat, const Vector & sigma, const Vector & e, double t, double eps,
  const Certificate & cert, double gamma, const Matrix & D,
  const ProjectionBounds & bounds);

/// Ideal weights W(t) = [Lambda^{-1} W_p^T(t), -Lambda^{-1}]^T. Ground truth,
/// simulator only.
Matrix ideal_weights(double t, const PlantModel & plant);

/// Psi = V / h + (1 / (2 gamma)) tr[Lambda W_tilde^T W_tilde], W_tilde = W_hat - W(t).
double energy_diagnostic(
  const Vector & e, const Matrix & W_hat, double t, const PlantModel & plant,
  const Certificate & cert, double gamma, double eps);

}  // namespace safemrac

#endif  // SAFEMRAC__ADAPT_HPP_
