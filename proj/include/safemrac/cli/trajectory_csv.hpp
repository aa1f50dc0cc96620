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

#ifndef SAFEMRAC__CLI__TRAJECTORY_CSV_HPP_
#define SAFEMRAC__CLI__TRAJECTORY_CSV_HPP_

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "safemrac/sim.hpp"

namespace safemrac::cli
{

/// Column names in file order:
/// t, x1..xn, xr1..xrn, e1..en, e_norm, V, h, eps, u, u_n, psi, eff_rate,
/// safe_margin, W_hat_1..W_hat_k. With more than one input the control
/// columns become u1..um and u_n1..u_nm.
std::vector<std::string> csv_columns(
  Eigen::Index state_dim, Eigen::Index input_dim, Eigen::Index weight_count);

/// Values are printed with 17 significant digits, so reading the file back
/// reproduces every record bit for bit.
void write_trajectory_csv(std::ostream & os, const TrajectoryLog & log);
void write_trajectory_csv(const std::filesystem::path & path, const TrajectoryLog & log);

/// Recovers dimensions and records. Summary fields are not part of the file.
TrajectoryLog read_trajectory_csv(std::istream & is);
TrajectoryLog read_trajectory_csv(const std::filesystem::path & path);

}  // namespace safemrac::cli

#endif  // SAFEMRAC__CLI__TRAJECTORY_CSV_HPP_
