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

#include "robeval/metrics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

#include <fmt/format.h>

#include "robeval/error.hpp"

namespace robeval {
namespace {

constexpr double kPi = std::numbers::pi;
// Upstream means may drift past [0, 1] by rounding; anything further out is
// a caller error.
constexpr double kProportionSlack = 1e-12;

constexpr std::array<ThresholdBand, 7> kThresholds{{
    {EffectCategory::kEssentiallyZero, 0.0, 0.01},
    {EffectCategory::kVerySmall, 0.01, 0.2},
    {EffectCategory::kSmall, 0.2, 0.5},
    {EffectCategory::kMedium, 0.5, 0.8},
    {EffectCategory::kLarge, 0.8, 1.2},
    {EffectCategory::kVeryLarge, 1.2, 2.0},
    {EffectCategory::kHuge, 2.0, kPi},
}};

constexpr std::array<std::pair<EffectCategory, std::string_view>, 7> kCategoryNames{{
    {EffectCategory::kEssentiallyZero, "essentially_zero"},
    {EffectCategory::kVerySmall, "very_small"},
    {EffectCategory::kSmall, "small"},
    {EffectCategory::kMedium, "medium"},
    {EffectCategory::kLarge, "large"},
    {EffectCategory::kVeryLarge, "very_large"},
    {EffectCategory::kHuge, "huge"},
}};

double checked_proportion(double s, const char* what) {
  if (std::isnan(s) || s < -kProportionSlack || s > 1.0 + kProportionSlack) {
    throw Error(ErrorCode::kInvalidArgument, fmt::format("{} = {} is outside [0, 1]", what, s));
  }
  return std::clamp(s, 0.0, 1.0);
}

}  // namespace

PdrValue pdr(double score_o, double score_p) {
  const double o = checked_proportion(score_o, "score_o");
  const double p = checked_proportion(score_p, "score_p");
  if (o == 0.0) {
    if (p == 0.0) return {0.0};
    return {};
  }
  return {1.0 - p / o};
}

std::string_view to_string(EffectCategory category) {
  for (const auto& [c, name] : kCategoryNames)
    if (c == category) return name;
  return "";
}

EffectCategory parse_effect_category(std::string_view name) {
  for (const auto& [c, n] : kCategoryNames)
    if (n == name) return c;
  throw Error(ErrorCode::kParse, fmt::format("unknown effect category '{}'", name));
}

std::span<const ThresholdBand> effect_thresholds() { return kThresholds; }

EffectCategory classify_effect(double h) {
  const double magnitude = std::fabs(h);
  if (std::isnan(h) || magnitude > kPi + kProportionSlack) {
    throw Error(ErrorCode::kInvalidArgument, fmt::format("|h| = {} exceeds pi", magnitude));
  }
  for (const auto& band : kThresholds) {
    if (magnitude < band.upper) return band.category;
  }
  return EffectCategory::kHuge;
}

double arcsine_transform(double s) { return 2.0 * std::asin(std::sqrt(s)); }

EffectSize cohens_h(double score_o, double score_p) {
  const double o = checked_proportion(score_o, "score_o");
  const double p = checked_proportion(score_p, "score_p");
  EffectSize e;
  e.h = std::clamp(arcsine_transform(p) - arcsine_transform(o), -kPi, kPi);
  e.nh = e.h / kPi;
  e.anh = std::fabs(e.nh);
  e.category = classify_effect(e.h);
  return e;
}

GroupMetrics group_metrics(const GroupScores& scores) {
  return {pdr(scores.score_o, scores.score_p), cohens_h(scores.score_o, scores.score_p)};
}

}  // namespace robeval
