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

#ifndef SAFEMRAC__SAFETY_HPP_
#define SAFEMRAC__SAFETY_HPP_

#include <optional>
#include <span>
#include <vector>

#include "safemrac/model.hpp"

namespace safemrac
{

/// Open quadratic sublevel set {x : x^T P x < level}.
struct LevelSet
{
  Matrix shape;
  double level{1.0};

  /// Throws ConfigError unless shape is spd and level > 0.
  void validate() const;
};

enum class BoundMode { constant, time_varying };

/// Either a fixed eps_bar or eps(t) = dist(xr(t), R^n \ S_s).
struct PerformanceBound
{
  BoundMode mode{BoundMode::constant};
  double eps_bar{1.0};
  LevelSet safe_set;
  std::optional<LevelSet> ref_set;
};

/// Euclidean distance from an interior point to the boundary x^T P x = c.
/// Returns 0 for points on or outside the boundary.
///
/// The closest boundary point is y = (I + lambda P)^{-1} x with lambda in
/// (-1/lambda_max(P), 0]. The constraint residual is monotone in lambda there,
/// so a bisection bracket followed by a Newton polish finds it.
double dist_point_to_boundary(const Vector & x, const LevelSet & set);

/// Gap between the boundaries of two concentric sets sharing one shape matrix:
/// (sqrt(c_out) - sqrt(c_in)) / sqrt(lambda_max(P)).
double dist_between_level_sets(const LevelSet & inner, const LevelSet & outer);

/// eps_bar in constant mode, the distance of xr to the safe-set boundary
/// otherwise. Throws ReferenceEscape when xr is not strictly inside.
double performance_bound_at(double t, const Vector & xr, const PerformanceBound & bound);

struct Membership
{
  bool inside{false};
  double margin{0.0};   // level - x^T P x
};

Membership in_safe_set(const Vector & x, const LevelSet & set);

struct RateViolation
{
  std::size_t index{0};
  double t{0.0};
  double eps{0.0};
  double eps_dot{0.0};
};

/// Flags every sample where eps is decreasing faster than (alpha1 / 2) eps.
/// Derivatives are central differences (second-order one-sided at the ends).
std::vector<RateViolation> assumption4_monitor(
  std::span<const double> eps_trace, double dt, double alpha1,
  double tol = 1e-9, double t0 = 0.0);

}  // namespace safemrac

#endif  // SAFEMRAC__SAFETY_HPP_
