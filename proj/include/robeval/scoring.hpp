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
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "robeval/dataset.hpp"

namespace robeval {

enum class Metric { kStringContainment, kBooleanAccuracy };

std::string_view to_string(Metric metric);
Metric parse_metric(std::string_view name);

// popqa and custom score by containment, boolq and siga by yes/no accuracy.
Metric default_metric(DatasetKind kind);

int string_containment(std::string_view prediction, std::span<const std::string> references);

// First standalone "yes"/"no" token, lower-cased; nullopt if neither occurs.
std::optional<std::string> extract_yes_no(std::string_view prediction);

// Throws kData unless the reference folds to "yes" or "no" (terminal
// punctuation ignored).
std::string normalize_boolean_reference(std::string_view reference);

int boolean_accuracy(std::string_view prediction, std::string_view reference);

int score_instance(const Instance& instance, std::string_view prediction, Metric metric);

struct VariantScore {
  std::string variant_id;
  VariantType variant_type = VariantType::kSuperficial;
  int score = 0;

  bool operator==(const VariantScore&) const = default;
};

struct GroupScores {
  std::string group_id;
  int score_o = 0;
  std::vector<VariantScore> variant_scores;
  double score_p = 0.0;

  // Same group restricted to one variant type; nullopt if it has none.
  std::optional<GroupScores> restricted_to(VariantType type) const;
};

// Computes score_p as the exact mean of the variant scores.
GroupScores make_group_scores(std::string group_id, int score_o,
                              std::vector<VariantScore> variant_scores);

// Every member of the group must have a prediction; a missing one throws
// kData naming (group_id, variant_id).
GroupScores score_group(const PerturbationGroup& group,
                        const std::map<std::string, std::string, std::less<>>& predictions,
                        Metric metric);

struct Prediction {
  std::string group_id;
  std::string variant_id;
  std::string model;
  std::string completion;
};

Json to_json(const Prediction& prediction);
std::vector<Prediction> read_predictions(const std::filesystem::path& path);

struct ScoreRecord {
  std::string group_id;
  std::string variant_id;
  int score = 0;
};

std::vector<ScoreRecord> read_scores(const std::filesystem::path& path);
void write_scores(const std::vector<GroupScores>& groups, const std::filesystem::path& path,
                  const std::optional<FileMeta>& meta = std::nullopt);

// Rebuilds group score vectors from flat score records, taking variant
// types from the dataset. Groups absent from `records` are skipped; a group
// that is only partly present throws kData.
std::vector<GroupScores> assemble_group_scores(const Dataset& dataset,
                                               const std::vector<ScoreRecord>& records);

}  // namespace robeval
