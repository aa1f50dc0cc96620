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

#ifndef SAFEMRAC__ERRORS_HPP_
#define SAFEMRAC__ERRORS_HPP_

#include <stdexcept>
#include <string>

namespace safemrac
{

/// Base class for every error raised by the library.
class Error : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

/// Inconsistent dimensions, non-spd matrices, bad parameter values.
class ConfigError : public Error
{
public:
  using Error::Error;
};

/// An argument lies outside the domain on which an operation is defined.
class DomainError : public Error
{
public:
  using Error::Error;
};

/// A configuration the library deliberately refuses to approximate.
class UnsupportedConfiguration : public Error
{
public:
  using Error::Error;
};

/// Linear-algebra failure (non-Hurwitz matrix, singular system, ...).
class SolverError : public Error
{
public:
  using Error::Error;
};

class InsufficientData : public Error
{
public:
  using Error::Error;
};

/// The barrier h(t, e) reached zero or went negative.
class BarrierBreach : public Error
{
public:
  BarrierBreach(double t, double h)
  : Error("barrier breach at t=" + std::to_string(t) + " (h=" + std::to_string(h) + ")"),
    time_(t), h_(h) {}

  double time() const noexcept {return time_;}
  double h() const noexcept {return h_;}

private:
  double time_;
  double h_;
};

/// The reference state left the safe set, so no positive performance bound exists.
class ReferenceEscape : public Error
{
public:
  explicit ReferenceEscape(double t)
  : Error("reference state left the safe set at t=" + std::to_string(t)), time_(t) {}

  double time() const noexcept {return time_;}

private:
  double time_;
};

class NumericalBlowup : public Error
{
public:
  explicit NumericalBlowup(double t)
  : Error("non-finite derivative at t=" + std::to_string(t)), time_(t) {}

  double time() const noexcept {return time_;}

private:
  double time_;
};

}  // namespace safemrac

#endif  // SAFEMRAC__ERRORS_HPP_
