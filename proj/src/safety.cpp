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

#include "safemrac/safety.hpp"

#include <cmath>
#include <string>

#include "safemrac/certify.hpp"
#include "safemrac/errors.hpp"

namespace safemrac
{

void LevelSet::validate() const
{
  if (!is_spd(shape)) {
    throw ConfigError("level set shape must be symmetric positive definite");
  }
  if (!(level > 0.0) || !std::isfinite(level)) {
    throw ConfigError("level set level must be positive, got " + std::to_string(level));
  }
}

Membership in_safe_set(const Vector & x, const LevelSet & set)
{
  const double margin = set.level - x.dot(set.shape * x);
  return {margin > 0.0, margin};
}

double dist_point_to_boundary(const Vector & x, const LevelSet & set)
{
  set.validate();
  if (x.size() != set.shape.rows()) {
    throw ConfigError("dist_point_to_boundary: dimension mismatch");
  }
  const double c = set.level;
  if (!(x.dot(set.shape * x) < c)) {
    return 0.0;
  }

  const SymmetricEigen eig = symmetric_eigen(set.shape);
  const Vector & p = eig.values;
  const Vector z = eig.vectors.transpose() * x;
  const Eigen::Index n = p.size();
  const double p_max = p(n - 1);

  // Directions sharing the largest eigenvalue are where the residual has its pole.
  std::vector<bool> top(static_cast<std::size_t>(n));
  double z_top_sq = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    top[static_cast<std::size_t>(i)] = p(i) >= p_max * (1.0 - 1e-14);
    if (top[static_cast<std::size_t>(i)]) {
      z_top_sq += z(i) * z(i);
    }
  }

  // The stationary point in terms of s = 1 + lambda p_max in (0, 1].
  auto residual = [&](double s) {
      const double lambda = (s - 1.0) / p_max;
      double acc = 0.0;
      for (Eigen::Index i = 0; i < n; ++i) {
        const double w = z(i) / (1.0 + lambda * p(i));
        acc += p(i) * w * w;
      }
      return acc - c;
    };
  auto residual_slope = [&](double s) {
      const double lambda = (s - 1.0) / p_max;
      double acc = 0.0;
      for (Eigen::Index i = 0; i < n; ++i) {
        const double d = 1.0 + lambda * p(i);
        acc += -2.0 * p(i) * p(i) * z(i) * z(i) / (d * d * d);
      }
      return acc / p_max;
    };
  auto distance_at = [&](double s) {
      const double lambda = (s - 1.0) / p_max;
      double acc = 0.0;
      for (Eigen::Index i = 0; i < n; ++i) {
        const double gap = z(i) * lambda * p(i) / (1.0 + lambda * p(i));
        acc += gap * gap;
      }
      return std::sqrt(acc);
    };

  // Degenerate case: x has no component along the top eigenspace and the
  // remaining coordinates cannot reach the boundary before the pole. The
  // closest point then sits at lambda = -1/p_max with a free top component.
  auto degenerate_distance = [&]() {
      double constraint = 0.0;
      double acc = 0.0;
      for (Eigen::Index i = 0; i < n; ++i) {
        if (top[static_cast<std::size_t>(i)]) {continue;}
        const double w = z(i) / (1.0 - p(i) / p_max);
        constraint += p(i) * w * w;
        acc += (z(i) - w) * (z(i) - w);
      }
      const double free_sq = std::max(0.0, (c - constraint) / p_max);
      return std::sqrt(acc + free_sq);
    };

  if (z_top_sq == 0.0) {
    double limit = -c;
    for (Eigen::Index i = 0; i < n; ++i) {
      if (top[static_cast<std::size_t>(i)]) {continue;}
      const double w = z(i) / (1.0 - p(i) / p_max);
      limit += p(i) * w * w;
    }
    if (limit <= 0.0) {
      return degenerate_distance();
    }
  }

  // Bracket: residual(1) < 0; shrink s toward the pole until it turns positive.
  double hi = 1.0;
  double lo = 0.5;
  while (residual(lo) <= 0.0) {
    hi = lo;
    lo *= 0.5;
    if (lo < 1e-300) {
      return degenerate_distance();
    }
  }

  const double tol = 1e-15 * c;
  double s = 0.5 * (lo + hi);
  for (int iter = 0; iter < 200; ++iter) {
    s = 0.5 * (lo + hi);
    const double r = residual(s);
    if (std::abs(r) <= tol || hi - lo <= 1e-16 * hi) {
      break;
    }
    if (r > 0.0) {
      lo = s;
    } else {
      hi = s;
    }
  }

  for (int iter = 0; iter < 4; ++iter) {
    const double r = residual(s);
    const double slope = residual_slope(s);
    if (r == 0.0 || slope == 0.0) {break;}
    const double next = s - r / slope;
    if (!(next > lo && next < hi) || std::abs(residual(next)) >= std::abs(r)) {
      break;
    }
    s = next;
  }
  return distance_at(s);
}

double dist_between_level_sets(const LevelSet & inner, const LevelSet & outer)
{
  inner.validate();
  outer.validate();
  if (inner.shape.rows() != outer.shape.rows()) {
    throw ConfigError("dist_between_level_sets: dimension mismatch");
  }
  const double scale = std::max(1.0, outer.shape.cwiseAbs().maxCoeff());
  if ((inner.shape - outer.shape).cwiseAbs().maxCoeff() > 1e-12 * scale) {
    throw UnsupportedConfiguration(
            "dist_between_level_sets: sets with different shape matrices are not supported");
  }
  if (!(inner.level < outer.level)) {
    throw DomainError("dist_between_level_sets: inner set is not contained in the outer set");
  }
  const double p_max = symmetric_eigen(outer.shape).values.maxCoeff();
  return (std::sqrt(outer.level) - std::sqrt(inner.level)) / std::sqrt(p_max);
}

double performance_bound_at(double t, const Vector & xr, const PerformanceBound & bound)
{
  if (bound.mode == BoundMode::constant) {
    return bound.eps_bar;
  }
  if (!in_safe_set(xr, bound.safe_set).inside) {
    throw ReferenceEscape(t);
  }
  const double eps = dist_point_to_boundary(xr, bound.safe_set);
  if (!(eps > 0.0)) {
    throw ReferenceEscape(t);
  }
  return eps;
}

std::vector<RateViolation> assumption4_monitor(
  std::span<const double> eps_trace, double dt, double alpha1, double tol, double t0)
{
  const std::size_t n = eps_trace.size();
  if (n < 3) {
    throw InsufficientData(
            "assumption4_monitor needs at least 3 samples, got " + std::to_string(n));
  }
  if (!(dt > 0.0)) {
    throw ConfigError("assumption4_monitor: dt must be positive");
  }

  std::vector<RateViolation> out;
  for (std::size_t k = 0; k < n; ++k) {
    double rate;
    if (k == 0) {
      rate = (-3.0 * eps_trace[0] + 4.0 * eps_trace[1] - eps_trace[2]) / (2.0 * dt);
    } else if (k == n - 1) {
      rate = (3.0 * eps_trace[k] - 4.0 * eps_trace[k - 1] + eps_trace[k - 2]) / (2.0 * dt);
    } else {
      rate = (eps_trace[k + 1] - eps_trace[k - 1]) / (2.0 * dt);
    }
    const double eps = eps_trace[k];
    if (rate < 0.0 && -rate > 0.5 * alpha1 * eps + tol) {
      out.push_back({k, t0 + static_cast<double>(k) * dt, eps, rate});
    }
  }
  return out;
}

}  // namespace safemrac
