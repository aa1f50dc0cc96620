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

#ifndef SAFEMRAC__CERTIFY_HPP_
#define SAFEMRAC__CERTIFY_HPP_

#include <cstdint>
#include <functional>
#include <optional>

#include "safemrac/model.hpp"

namespace safemrac
{

/// Exponential-stability certificate of the nominal error dynamics:
///   k1 |e|^2 <= V(e) <= k2 |e|^2,   grad V(e)^T g(e) <= -k0 |e|^2.
struct Certificate
{
  std::function<double(const Vector &)> lyap;
  std::function<Vector(const Vector &)> lyap_grad;
  double k0{0.0};
  double k1{0.0};
  double k2{0.0};
  double alpha1{0.0};   // k0 / k2

  /// Fills alpha1 from k0 and k2 and checks positivity and k1 <= k2.
  static Certificate make(
    std::function<double(const Vector &)> lyap,
    std::function<Vector(const Vector &)> lyap_grad,
    double k0, double k1, double k2);
};

/// u_n(x, xr, c) together with the certificate it satisfies.
struct NominalController
{
  std::function<Vector(const Vector &, const Vector &, const Vector &)> law;
  Certificate certificate;
};

/// P solving Ae^T P + P Ae + R = 0.
struct QuadraticCertificateData
{
  Matrix P;
  Matrix R;
  Matrix Ae;
};

struct SymmetricEigen
{
  Vector values;   // ascending
  Matrix vectors;  // columns, orthonormal
};

/// Closed form for 2x2, Eigen's self-adjoint solver otherwise.
SymmetricEigen symmetric_eigen(const Matrix & S);

/// True when S is symmetric (to a relative 1e-12) with a positive smallest eigenvalue.
bool is_spd(const Matrix & S);

/// Solves the continuous Lyapunov equation through the n(n+1)/2 linear
/// system in the upper-triangular entries of P. Throws SolverError when Ae
/// is not Hurwitz, the system is singular, or the residual exceeds 1e-10.
QuadraticCertificateData solve_lyapunov(const Matrix & Ae, const Matrix & R);

double lyapunov_residual(const QuadraticCertificateData & data);

/// V = e^T P e, grad V = 2 P e, k1 = lambda_min(P), k2 = lambda_max(P), k0 = lambda_min(R).
Certificate quadratic_certificate(const QuadraticCertificateData & data);

/// Error matrix [[0, 1], [-(1 + l1), -l2]] of the Van der Pol nominal loop.
Matrix vdp_error_matrix(double l1, double l2);

QuadraticCertificateData vdp_certificate_data(double l1, double l2, const Matrix & R);

/// u_n = -l1 e1 - l2 e2 + x1 x2 - x2^2 + c + mu xr2 (1 - xr1^2).
NominalController vdp_nominal(
  double l1, double l2, double mu,
  const Matrix & R = Matrix::Identity(2, 2));

struct CertificateMargins
{
  double lower{0.0};   // V - k1 |e|^2
  double upper{0.0};   // k2 |e|^2 - V
  double decay{0.0};   // -k0 |e|^2 - grad V^T g
  bool holds{true};
};

CertificateMargins check_certificate_at(
  const Certificate & cert, const std::function<Vector(const Vector &)> & error_rhs,
  const Vector & e, double tol = 1e-9);

struct CertificateReport
{
  std::size_t samples{0};
  std::size_t violations{0};
  double worst_lower{0.0};
  double worst_upper{0.0};
  double worst_decay{0.0};
  std::optional<Vector> first_violation;

  bool ok() const {return violations == 0;}
};

/// Samples e uniformly in the ball of the given radius and checks the
/// sandwich and decay inequalities. Violations are reported, never thrown.
CertificateReport verify_certificate(
  const Certificate & cert,
  const std::function<Vector(const Vector &)> & error_rhs,
  Eigen::Index dim, double radius, std::size_t n_samples,
  std::uint64_t seed = 20200101u);

}  // namespace safemrac

#endif  // SAFEMRAC__CERTIFY_HPP_
