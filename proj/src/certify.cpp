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

#include "safemrac/certify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <string>

#include <Eigen/Eigenvalues>

#include "safemrac/errors.hpp"

namespace safemrac
{

Certificate Certificate::make(
  std::function<double(const Vector &)> lyap,
  std::function<Vector(const Vector &)> lyap_grad,
  double k0, double k1, double k2)
{
  if (!(k0 > 0.0) || !(k1 > 0.0) || !(k2 > 0.0)) {
    throw ConfigError("certificate constants k0, k1, k2 must be positive");
  }
  if (k1 > k2) {
    throw ConfigError("certificate requires k1 <= k2");
  }
  Certificate cert;
  cert.lyap = std::move(lyap);
  cert.lyap_grad = std::move(lyap_grad);
  cert.k0 = k0;
  cert.k1 = k1;
  cert.k2 = k2;
  cert.alpha1 = k0 / k2;
  return cert;
}

namespace
{

SymmetricEigen eigen_2x2(const Matrix & S)
{
  const double a = S(0, 0);
  const double b = 0.5 * (S(0, 1) + S(1, 0));
  const double d = S(1, 1);
  const double mean = 0.5 * (a + d);
  const double disc = std::hypot(0.5 * (a - d), b);

  SymmetricEigen out;
  out.values.resize(2);
  out.values << mean - disc, mean + disc;
  out.vectors.resize(2, 2);

  if (disc == 0.0) {
    out.vectors.setIdentity();
    return out;
  }
  for (int k = 0; k < 2; ++k) {
    const double lam = out.values(k);
    Eigen::Vector2d v1(b, lam - a);
    Eigen::Vector2d v2(lam - d, b);
    Eigen::Vector2d v = v1.squaredNorm() >= v2.squaredNorm() ? v1 : v2;
    out.vectors.col(k) = v.normalized();
  }
  return out;
}

}  // namespace

SymmetricEigen symmetric_eigen(const Matrix & S)
{
  if (S.rows() != S.cols() || S.rows() == 0) {
    throw ConfigError("symmetric_eigen: matrix must be square and non-empty");
  }
  if (S.rows() == 1) {
    return {S.col(0), Matrix::Identity(1, 1)};
  }
  if (S.rows() == 2) {
    return eigen_2x2(S);
  }
  Eigen::SelfAdjointEigenSolver<Matrix> solver(0.5 * (S + S.transpose()));
  if (solver.info() != Eigen::Success) {
    throw SolverError("symmetric eigensolver did not converge");
  }
  return {solver.eigenvalues(), solver.eigenvectors()};
}

bool is_spd(const Matrix & S)
{
  if (S.rows() != S.cols() || S.rows() == 0 || !S.allFinite()) {
    return false;
  }
  const double scale = std::max(1.0, S.cwiseAbs().maxCoeff());
  if ((S - S.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) {
    return false;
  }
  return symmetric_eigen(S).values(0) > 0.0;
}

QuadraticCertificateData solve_lyapunov(const Matrix & Ae, const Matrix & R)
{
  const Eigen::Index n = Ae.rows();
  if (Ae.cols() != n || R.rows() != n || R.cols() != n || n == 0) {
    throw ConfigError("solve_lyapunov: Ae and R must be square of equal size");
  }
  if (!is_spd(R)) {
    throw ConfigError("solve_lyapunov: R must be symmetric positive definite");
  }

  Eigen::EigenSolver<Matrix> spectrum(Ae, false);
  if (spectrum.info() != Eigen::Success) {
    throw SolverError("solve_lyapunov: eigenvalue computation of Ae failed");
  }
  const double max_real = spectrum.eigenvalues().real().maxCoeff();
  if (!(max_real < 0.0)) {
    throw SolverError(
            "solve_lyapunov: Ae is not Hurwitz (largest eigenvalue real part " +
            std::to_string(max_real) + ")");
  }

  // Unknowns are P(i, j) for i <= j, one equation per (k, l) with k <= l.
  const Eigen::Index N = n * (n + 1) / 2;
  auto index = [n](Eigen::Index i, Eigen::Index j) {
      if (i > j) {std::swap(i, j);}
      return i * n - i * (i - 1) / 2 + (j - i);
    };

  Matrix M = Matrix::Zero(N, N);
  Vector rhs(N);
  for (Eigen::Index k = 0; k < n; ++k) {
    for (Eigen::Index l = k; l < n; ++l) {
      const Eigen::Index row = index(k, l);
      // (Ae^T P)(k, l) = sum_i Ae(i, k) P(i, l)
      for (Eigen::Index i = 0; i < n; ++i) {
        M(row, index(i, l)) += Ae(i, k);
      }
      // (P Ae)(k, l) = sum_j P(k, j) Ae(j, l)
      for (Eigen::Index j = 0; j < n; ++j) {
        M(row, index(k, j)) += Ae(j, l);
      }
      rhs(row) = -0.5 * (R(k, l) + R(l, k));
    }
  }

  Eigen::FullPivLU<Matrix> lu(M);
  if (!lu.isInvertible()) {
    throw SolverError("solve_lyapunov: singular linear system");
  }
  const Vector p = lu.solve(rhs);

  QuadraticCertificateData data;
  data.P.resize(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      data.P(i, j) = p(index(i, j));
    }
  }
  data.R = 0.5 * (R + R.transpose());
  data.Ae = Ae;

  const double residual = lyapunov_residual(data);
  if (!(residual <= 1e-10)) {
    throw SolverError("solve_lyapunov: residual " + std::to_string(residual) + " exceeds 1e-10");
  }
  if (!is_spd(data.P)) {
    throw SolverError("solve_lyapunov: solution is not positive definite");
  }
  return data;
}

double lyapunov_residual(const QuadraticCertificateData & data)
{
  return (data.Ae.transpose() * data.P + data.P * data.Ae + data.R).norm();
}

Certificate quadratic_certificate(const QuadraticCertificateData & data)
{
  const Vector p_eig = symmetric_eigen(data.P).values;
  const Vector r_eig = symmetric_eigen(data.R).values;
  const Matrix P = data.P;
  return Certificate::make(
    [P](const Vector & e) {return e.dot(P * e);},
    [P](const Vector & e) -> Vector {return 2.0 * (P * e);},
    r_eig(0), p_eig(0), p_eig(p_eig.size() - 1));
}

Matrix vdp_error_matrix(double l1, double l2)
{
  Matrix Ae(2, 2);
  Ae << 0.0, 1.0,
    -(1.0 + l1), -l2;
  return Ae;
}

QuadraticCertificateData vdp_certificate_data(double l1, double l2, const Matrix & R)
{
  if (!(l1 > 0.0) || !(l2 > 0.0)) {
    throw ConfigError("nominal gains l1, l2 must be positive");
  }
  return solve_lyapunov(vdp_error_matrix(l1, l2), R);
}

NominalController vdp_nominal(double l1, double l2, double mu, const Matrix & R)
{
  NominalController nominal;
  nominal.certificate = quadratic_certificate(vdp_certificate_data(l1, l2, R));
  nominal.law = [l1, l2, mu](const Vector & x, const Vector & xr, const Vector & c) {
      const double e1 = x(0) - xr(0);
      const double e2 = x(1) - xr(1);
      const double un = -l1 * e1 - l2 * e2 + x(0) * x(1) - x(1) * x(1) + c(0) +
        mu * xr(1) * (1.0 - xr(0) * xr(0));
      return Vector::Constant(1, un);
    };
  return nominal;
}

CertificateMargins check_certificate_at(
  const Certificate & cert, const std::function<Vector(const Vector &)> & error_rhs,
  const Vector & e, double tol)
{
  const double sq = e.squaredNorm();
  const double v = cert.lyap(e);
  const double vdot = cert.lyap_grad(e).dot(error_rhs(e));
  const double slack = tol * std::max(1.0, sq);

  CertificateMargins m;
  m.lower = v - cert.k1 * sq;
  m.upper = cert.k2 * sq - v;
  m.decay = -cert.k0 * sq - vdot;
  m.holds = m.lower >= -slack && m.upper >= -slack && m.decay >= -slack;
  return m;
}

CertificateReport verify_certificate(
  const Certificate & cert,
  const std::function<Vector(const Vector &)> & error_rhs,
  Eigen::Index dim, double radius, std::size_t n_samples, std::uint64_t seed)
{
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> uniform(0.0, 1.0);

  CertificateReport report;
  report.worst_lower = report.worst_upper = report.worst_decay =
    std::numeric_limits<double>::infinity();

  for (std::size_t k = 0; k < n_samples; ++k) {
    Vector e(dim);
    for (Eigen::Index i = 0; i < dim; ++i) {
      e(i) = normal(rng);
    }
    const double nrm = e.norm();
    if (nrm > 0.0) {
      e *= radius * std::pow(uniform(rng), 1.0 / static_cast<double>(dim)) / nrm;
    }

    const CertificateMargins m = check_certificate_at(cert, error_rhs, e);
    report.worst_lower = std::min(report.worst_lower, m.lower);
    report.worst_upper = std::min(report.worst_upper, m.upper);
    report.worst_decay = std::min(report.worst_decay, m.decay);
    ++report.samples;
    if (!m.holds) {
      ++report.violations;
      if (!report.first_violation) {
        report.first_violation = e;
      }
    }
  }
  return report;
}

}  // namespace safemrac
