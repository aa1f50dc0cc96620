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

#ifndef SAFEMRAC__CLI__SELF_CHECK_HPP_
#define SAFEMRAC__CLI__SELF_CHECK_HPP_

#include <string>
#include <vector>

namespace safemrac::cli
{

struct CheckResult
{
  std::string name;
  bool passed{false};
  std::string detail;
};

/// Quick certificate, geometry and projection checks behind the `verify` verb.
std::vector<CheckResult> run_self_checks();

}  // namespace safemrac::cli

#endif  // SAFEMRAC__CLI__SELF_CHECK_HPP_
