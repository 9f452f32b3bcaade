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

#include <optional>
#include <span>
#include <string_view>

#include "robeval/scoring.hpp"

namespace robeval {

// Performance drop rate; nullopt encodes "undefined".
struct PdrValue {
  std::optional<double> value;

  bool defined() const { return value.has_value(); }
};

PdrValue pdr(double score_o, double score_p);

enum class EffectCategory {
  kEssentiallyZero,
  kVerySmall,
  kSmall,
  kMedium,
  kLarge,
  kVeryLarge,
  kHuge,
};

std::string_view to_string(EffectCategory category);
EffectCategory parse_effect_category(std::string_view name);

// Interval on |h|, closed below and open above, except the last band which
// is closed at pi.
struct ThresholdBand {
  EffectCategory category;
  double lower;
  double upper;
};

std::span<const ThresholdBand> effect_thresholds();

EffectCategory classify_effect(double h);

// 2 * asin(sqrt(s)), the variance-stabilising transform of a proportion.
double arcsine_transform(double s);

struct EffectSize {
  double h = 0.0;    // in [-pi, pi], positive means the perturbed score is higher
  double nh = 0.0;   // h / pi
  double anh = 0.0;  // |nh|
  EffectCategory category = EffectCategory::kEssentiallyZero;
};

EffectSize cohens_h(double score_o, double score_p);

struct GroupMetrics {
  PdrValue pdr;
  EffectSize effect;
};

GroupMetrics group_metrics(const GroupScores& scores);

}  // namespace robeval
