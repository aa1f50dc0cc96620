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

#include "safemrac/model.hpp"

#include <cmath>
#include <string>

#include "safemrac/errors.hpp"

namespace safemrac
{

void PlantModel::validate() const
{
  if (!drift || !uncertainty.basis || !uncertainty.true_weights) {
    throw ConfigError("plant model has an unset function");
  }
  const auto n = state_dim();
  const auto m = input_dim();
  if (n == 0 || m == 0) {
    throw ConfigError("input map must be non-empty");
  }
  if (control_effectiveness.rows() != m || control_effectiveness.cols() != m) {
    throw ConfigError(
            "control effectiveness must be " + std::to_string(m) + "x" + std::to_string(m));
  }
  for (Eigen::Index i = 0; i < m; ++i) {
    for (Eigen::Index j = 0; j < m; ++j) {
      const double v = control_effectiveness(i, j);
      if (i == j ? !(v > 0.0) : v != 0.0) {
        throw ConfigError("control effectiveness must be diagonal with positive entries");
      }
    }
  }
  if (uncertainty.basis_dim <= 0) {
    throw ConfigError("uncertainty basis dimension must be positive");
  }
  const Vector zero = Vector::Zero(n);
  if (drift(zero).size() != n) {
    throw ConfigError("drift output dimension differs from state dimension");
  }
  if (uncertainty.basis(zero).size() != uncertainty.basis_dim) {
    throw ConfigError("basis output length differs from declared basis dimension");
  }
  const Matrix w = uncertainty.true_weights(0.0);
  if (w.rows() != uncertainty.basis_dim || w.cols() != m) {
    throw ConfigError("true weights must be s x m");
  }
}

Vector uncertainty_eval(double t, const Vector & x, const Uncertainty & unc)
{
  return unc.true_weights(t).transpose() * unc.basis(x);
}

Vector plant_rhs(double t, const Vector & x, const Vector & u, const PlantModel & plant)
{
  if (x.size() != plant.state_dim() || u.size() != plant.input_dim()) {
    throw ConfigError(
            "plant_rhs: got x of size " + std::to_string(x.size()) + " and u of size " +
            std::to_string(u.size()) + ", expected " + std::to_string(plant.state_dim()) +
            " and " + std::to_string(plant.input_dim()));
  }
  const Vector delta = uncertainty_eval(t, x, plant.uncertainty);
  return plant.drift(x) + plant.input_map * (plant.control_effectiveness * u + delta);
}

Vector reference_rhs(double t, const Vector & xr, const ReferenceModel & ref)
{
  return ref.drift(xr, ref.command(t));
}

VdpProblem vdp_example(const VdpParameters & params)
{
  VdpProblem problem;

  PlantModel & plant = problem.plant;
  plant.drift = [](const Vector & x) {
      Vector dx(2);
      dx << x(1), -x(0) - x(0) * x(1) + x(1) * x(1);
      return dx;
    };
  plant.input_map = Matrix(2, 1);
  plant.input_map << 0.0, 1.0;
  plant.control_effectiveness = Matrix::Constant(1, 1, params.lambda);
  plant.uncertainty.basis_dim = 3;
  plant.uncertainty.basis = [](const Vector & x) {
      Vector s(3);
      s << x(0), x(0) * x(1), x(0) * x(1) * x(1);
      return s;
    };
  if (params.uncertainty) {
    plant.uncertainty.true_weights = [](double t) {
        Matrix w(3, 1);
        w << 0.3 * std::sin(0.1 * t), 0.3 * std::cos(0.3 * t), 1.0;
        return w;
      };
  } else {
    plant.uncertainty.true_weights = [](double) {return Matrix::Zero(3, 1).eval();};
  }

  const double mu = params.mu;
  problem.reference.drift = [mu](const Vector & xr, const Vector & c) {
      Vector dx(2);
      dx << xr(1), -xr(0) + mu * xr(1) * (1.0 - xr(0) * xr(0)) + c(0);
      return dx;
    };
  const double amplitude = params.command_amplitude;
  problem.reference.command = [amplitude](double t) {
      return Vector::Constant(1, amplitude * std::sin(t));
    };

  plant.validate();
  return problem;
}

}  // namespace safemrac
