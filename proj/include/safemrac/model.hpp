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

#ifndef SAFEMRAC__MODEL_HPP_
#define SAFEMRAC__MODEL_HPP_

#include <Eigen/Dense>

#include <functional>

namespace safemrac
{

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Matched uncertainty delta(t, x) = W_p(t)^T sigma_p(x).
///
/// The true weights are ground truth for the simulator; controllers never
/// read them.
struct Uncertainty
{
  std::function<Vector(const Vector &)> basis;           // sigma_p : R^n -> R^s
  std::function<Matrix(double)> true_weights;            // W_p(t), s x m
  Eigen::Index basis_dim{0};                             // s
};

/// Uncertain plant xdot = F(x) + D Lambda u + D delta(t, x).
struct PlantModel
{
  std::function<Vector(const Vector &)> drift;           // F, with F(0) = 0
  Matrix input_map;                                      // D, n x m
  Matrix control_effectiveness;                          // Lambda, diagonal positive, m x m
  Uncertainty uncertainty;

  Eigen::Index state_dim() const {return input_map.rows();}
  Eigen::Index input_dim() const {return input_map.cols();}

  /// Throws ConfigError when dimensions or Lambda are inconsistent.
  void validate() const;
};

/// Reference system xr_dot = F_r(xr, c(t)).
struct ReferenceModel
{
  std::function<Vector(const Vector &, const Vector &)> drift;
  std::function<Vector(double)> command;
};

Vector uncertainty_eval(double t, const Vector & x, const Uncertainty & unc);

Vector plant_rhs(double t, const Vector & x, const Vector & u, const PlantModel & plant);

Vector reference_rhs(double t, const Vector & xr, const ReferenceModel & ref);

/// Parameters of the forced Van der Pol tracking problem.
struct VdpParameters
{
  double mu{1.0};
  double lambda{0.75};
  double command_amplitude{1.2};
  bool uncertainty{true};
};

struct VdpProblem
{
  PlantModel plant;
  ReferenceModel reference;
};

/// Plant F(x) = (x2, -x1 - x1 x2 + x2^2), D = (0, 1)^T, basis
/// (x1, x1 x2, x1 x2^2) with weights (0.3 sin 0.1t, 0.3 cos 0.3t, 1), and the
/// forced Van der Pol reference with c(t) = A sin t.
///
/// With `uncertainty` off the weights are identically zero but the basis is
/// kept, so the regressor dimension does not change.
VdpProblem vdp_example(const VdpParameters & params = {});

}  // namespace safemrac

#endif  // SAFEMRAC__MODEL_HPP_
