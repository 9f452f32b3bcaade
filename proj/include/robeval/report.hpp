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
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "robeval/metrics.hpp"
#include "robeval/scoring.hpp"
#include "robeval/stats.hpp"

namespace robeval {

enum class VariantFilter { kAll, kSuperficial, kParaphrase, kDistraction };

std::string_view to_string(VariantFilter filter);
VariantFilter parse_variant_filter(std::string_view name);

struct ReportRow {
  std::string model;
  std::string dataset;
  VariantFilter variant_filter = VariantFilter::kAll;
  std::size_t n_groups = 0;
  double mean_orig = 0.0;
  double mean_pert = 0.0;

  double nh_mean = 0.0;
  double nh_lo = 0.0;
  double nh_hi = 0.0;
  bool nh_significant = false;
  EffectCategory nh_category = EffectCategory::kEssentiallyZero;

  double anh_mean = 0.0;
  double anh_lo = 0.0;
  double anh_hi = 0.0;
  bool anh_significant = false;
  EffectCategory anh_category = EffectCategory::kEssentiallyZero;

  // Absent when every group's PDR is undefined.
  std::optional<double> pdr_mean;
  std::optional<double> pdr_lo;
  std::optional<double> pdr_hi;
  std::size_t pdr_n_undefined = 0;

  bool operator==(const ReportRow&) const = default;
};

struct RobustnessReport {
  std::vector<ReportRow> rows;

  bool operator==(const RobustnessReport&) const = default;
};

// One row over `groups`. For a typed filter, score_p is recomputed over the
// matching variants only and groups without any are dropped. Groups are
// sorted by id and the bootstrap seed is derived from (config.seed, row key),
// so the row is independent of input order and of other rows.
ReportRow aggregate(std::span<const GroupScores> groups, VariantFilter filter,
                    const BootstrapConfig& config, std::string_view model,
                    std::string_view dataset);

// The "all" row plus one row per variant type present in the data.
std::vector<ReportRow> breakdown_by_type(std::span<const GroupScores> groups,
                                         const BootstrapConfig& config, std::string_view model,
                                         std::string_view dataset);

struct CurvePoint {
  double score_p = 0.0;
  double nh = 0.0;
  double reverse_pdr = 0.0;
};

struct CorrelationCurve {
  double score_o = 0.0;
  std::vector<CurvePoint> points;
  double pearson_r = 0.0;
};

CorrelationCurve correlation_curve(double score_o, double grid_step);

enum class ReportFormat { kJson, kCsv, kMarkdown };

inline constexpr std::string_view kReportCsvHeader =
    "model,dataset,variant_filter,n_groups,mean_orig,mean_pert,nh_mean,nh_lo,nh_hi,"
    "nh_significant,nh_category,anh_mean,anh_lo,anh_hi,anh_significant,anh_category,"
    "pdr_mean,pdr_lo,pdr_hi,pdr_n_undefined";

std::string render(const RobustnessReport& report, ReportFormat format,
                   const std::optional<FileMeta>& meta = std::nullopt);
void write_report(const RobustnessReport& report, ReportFormat format,
                  const std::filesystem::path& path,
                  const std::optional<FileMeta>& meta = std::nullopt);

RobustnessReport report_from_csv(std::string_view csv);
RobustnessReport report_from_json(const Json& value);

// Two-decimal cell with "*" appended when significant.
std::string format_cell(double value, bool significant);

std::string render_curve_csv(const CorrelationCurve& curve,
                             const std::optional<FileMeta>& meta = std::nullopt);

}  // namespace robeval
