// Copyright 2026 The robeval Authors. All rights reserved.
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

#pragma once

#include <array>
#include <cstddef>
#include <string_view>

namespace robeval::testing {

// Aggregates of the ten-group fixture, produced by
// tests/oracles/fixture_oracle.py at 50 significant digits.
struct FixtureRow {
  std::string_view filter;
  std::size_t n_groups;
  double mean_orig;
  double mean_pert;
  double nh_mean;
  double anh_mean;
  double pdr_mean;
  std::size_t pdr_n_undefined;
};

inline constexpr std::array<FixtureRow, 4> kTenGroupOracle = {{
    {"all", 10, 0.7, 0.575, -0.13333333333333333, 0.41169864373945479, 0.32291666666666667, 2},
    {"superficial", 9, 0.7, 0.66666666666666667, -0.11111111111111111, 0.22222222222222222, 0.1875, 1},
    {"paraphrase", 9, 0.7, 0.33333333333333333, -0.33333333333333333, 0.55555555555555556, 0.5, 1},
    {"distraction", 5, 0.7, 0.8, 0.0, 0.4, 0.25, 1},
}};

}  // namespace robeval::testing
