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

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>

namespace robeval {

struct BootstrapConfig {
  std::size_t replicates = 1000;
  double confidence = 0.95;
  std::uint64_t seed = 0;

  void validate() const;
};

struct IntervalEstimate {
  double mean = 0.0;
  double lo = 0.0;
  double hi = 0.0;
  std::size_t n_used = 0;
  std::size_t n_undefined = 0;
  bool degenerate = false;  // fewer than two defined values

  bool operator==(const IntervalEstimate&) const = default;
};

// Percentile bootstrap of the mean over the defined entries. Replicate b
// draws from a generator seeded by (seed, b), so the result does not depend
// on evaluation order. Throws kUndefined when nothing is defined.
IntervalEstimate bootstrap_ci(std::span<const std::optional<double>> scores,
                              const BootstrapConfig& config);
IntervalEstimate bootstrap_ci(std::span<const double> scores, const BootstrapConfig& config);

double pearson_r(std::span<const double> xs, std::span<const double> ys);

// True iff the interval excludes zero.
bool significant(const IntervalEstimate& interval);

}  // namespace robeval
