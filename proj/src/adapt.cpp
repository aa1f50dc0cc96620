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

#include "safemrac/adapt.hpp"

#include <string>

#include "safemrac/errors.hpp"

namespace safemrac
{

ProjectionBounds ProjectionBounds::uniform(Eigen::Index dim, double lo, double hi, double nu)
{
  ProjectionBounds b{Vector::Constant(dim, lo), Vector::Constant(dim, hi), nu};
  b.validate();
  return b;
}

void ProjectionBounds::validate() const
{
  if (theta_min.size() != theta_max.size() || theta_min.size() == 0) {
    throw ConfigError("projection bounds must be non-empty and of equal length");
  }
  if (!(nu > 0.0)) {
    throw ConfigError("projection boundary layer nu must be positive");
  }
  for (Eigen::Index i = 0; i < theta_min.size(); ++i) {
    if (!(theta_min(i) + 2.0 * nu < theta_max(i))) {
      throw ConfigError(
              "projection bounds component " + std::to_string(i) +
              " violates theta_min + 2 nu < theta_max");
    }
  }
}

bool ProjectionBounds::contains(const Vector & theta, double slack) const
{
  return theta.size() == theta_min.size() &&
         (theta.array() >= theta_min.array() - slack).all() &&
         (theta.array() <= theta_max.array() + slack).all();
}

bool ProjectionBounds::contains_interior(const Vector & theta) const
{
  return theta.size() == theta_min.size() &&
         (theta.array() >= theta_min.array() + nu).all() &&
         (theta.array() <= theta_max.array() - nu).all();
}

Vector proj(const Vector & theta, const Vector & y, const ProjectionBounds & bounds, double slack)
{
  if (theta.size() != y.size() || theta.size() != bounds.theta_min.size()) {
    throw ConfigError("proj: dimension mismatch");
  }
  if (!bounds.contains(theta, slack)) {
    throw DomainError("proj: parameter estimate left the projection hypercube");
  }
  Vector out(y.size());
  for (Eigen::Index i = 0; i < y.size(); ++i) {
    const double lo = bounds.theta_min(i);
    const double hi = bounds.theta_max(i);
    if (theta(i) > hi - bounds.nu && y(i) > 0.0) {
      out(i) = ((hi - theta(i)) / bounds.nu) * y(i);
    } else if (theta(i) < lo + bounds.nu && y(i) < 0.0) {
      out(i) = ((theta(i) - lo) / bounds.nu) * y(i);
    } else {
      out(i) = y(i);
    }
  }
  return out;
}

Matrix proj_m(const Matrix & Theta, const Matrix & Y, const ProjectionBounds & bounds, double slack)
{
  if (Theta.rows() != Y.rows() || Theta.cols() != Y.cols()) {
    throw ConfigError("proj_m: Theta and Y must have equal shape");
  }
  Matrix out(Y.rows(), Y.cols());
  for (Eigen::Index j = 0; j < Y.cols(); ++j) {
    out.col(j) = proj(Theta.col(j), Y.col(j), bounds, slack);
  }
  return out;
}

Vector regressor(
  const Vector & x, const Vector & xr, const Vector & c,
  const NominalController & nominal,
  const std::function<Vector(const Vector &)> & basis)
{
  const Vector sp = basis(x);
  const Vector un = nominal.law(x, xr, c);
  Vector sigma(sp.size() + un.size());
  sigma << sp, un;
  return sigma;
}

Vector control(const Matrix & W_hat, const Vector & sigma)
{
  if (W_hat.rows() != sigma.size()) {
    throw ConfigError("control: weight rows differ from regressor length");
  }
  return -(W_hat.transpose() * sigma);
}

BarrierEvaluation barrier(
  double t, const Vector & e, double eps, const Certificate & cert, double gamma)
{
  BarrierEvaluation out;
  out.V = cert.lyap(e);
  out.eps = eps;
  out.h = cert.k1 * eps * eps - out.V;
  if (!(out.h > 0.0)) {
    throw BarrierBreach(t, out.h);
  }
  out.effective_rate = gamma * (out.h + out.V) / (out.h * out.h);
  return out;
}

Matrix update_rhs(
  const Matrix & W_hat, const Vector & sigma, const Vector & e, double t, double eps,
  const Certificate & cert, double gamma, const Matrix & D,
  const ProjectionBounds & bounds)
{
  const BarrierEvaluation b = barrier(t, e, eps, cert, gamma);
  const double gain = (b.h + b.V) / (b.h * b.h);
  const Vector grad = cert.lyap_grad(e);
  const Matrix drive = gain * sigma * (grad.transpose() * D);
  return gamma * proj_m(W_hat, drive, bounds);
}

Matrix ideal_weights(double t, const PlantModel & plant)
{
  const Eigen::Index m = plant.input_dim();
  const Eigen::Index s = plant.uncertainty.basis_dim;
  const Matrix lambda_inv = plant.control_effectiveness.diagonal().cwiseInverse().asDiagonal();
  Matrix W(s + m, m);
  W.topRows(s) = plant.uncertainty.true_weights(t) * lambda_inv;
  W.bottomRows(m) = -lambda_inv;
  return W;
}

double energy_diagnostic(
  const Vector & e, const Matrix & W_hat, double t, const PlantModel & plant,
  const Certificate & cert, double gamma, double eps)
{
  const BarrierEvaluation b = barrier(t, e, eps, cert, gamma);
  const Matrix W_tilde = W_hat - ideal_weights(t, plant);
  // Lambda diagonal: tr[Lambda W~^T W~] = sum_j Lambda_jj |col_j(W~)|^2
  double trace = 0.0;
  for (Eigen::Index j = 0; j < W_tilde.cols(); ++j) {
    trace += plant.control_effectiveness(j, j) * W_tilde.col(j).squaredNorm();
  }
  return b.V / b.h + trace / (2.0 * gamma);
}

}  // namespace safemrac
