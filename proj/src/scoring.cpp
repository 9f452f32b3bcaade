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

#include "robeval/scoring.hpp"

#include <map>

#include <fmt/format.h>

#include "robeval/error.hpp"
#include "robeval/text.hpp"

namespace robeval {
namespace {

std::string string_field(const JsonlRecord& record, const char* key, const std::filesystem::path& path) {
  auto it = record.value.find(key);
  if (it == record.value.end() || !it->is_string()) {
    throw Error(ErrorCode::kData, fmt::format("{}:{}: field '{}' must be a string", path.string(),
                                              record.line_no, key));
  }
  return it->get<std::string>();
}

}  // namespace

std::string_view to_string(Metric metric) {
  return metric == Metric::kStringContainment ? "string_containment" : "boolean_accuracy";
}

Metric parse_metric(std::string_view name) {
  if (name == "string_containment") return Metric::kStringContainment;
  if (name == "boolean_accuracy") return Metric::kBooleanAccuracy;
  throw Error(ErrorCode::kInvalidArgument, fmt::format("unknown metric '{}'", name));
}

Metric default_metric(DatasetKind kind) {
  switch (kind) {
    case DatasetKind::kBoolQ:
    case DatasetKind::kSIGA:
      return Metric::kBooleanAccuracy;
    case DatasetKind::kPopQA:
    case DatasetKind::kCustom:
      break;
  }
  return Metric::kStringContainment;
}

int string_containment(std::string_view prediction, std::span<const std::string> references) {
  const std::string haystack = text::fold(prediction);
  for (const auto& ref : references) {
    if (haystack.find(text::fold(ref)) != std::string::npos) return 1;
  }
  return 0;
}

std::optional<std::string> extract_yes_no(std::string_view prediction) {
  const std::u32string s = text::to_utf32(prediction);
  std::size_t i = 0;
  while (i < s.size()) {
    if (!text::is_alnum(s[i])) {
      ++i;
      continue;
    }
    std::size_t j = i;
    std::u32string token;
    while (j < s.size() && text::is_alnum(s[j])) token.push_back(text::to_lower(s[j++]));
    if (token == U"yes") return "yes";
    if (token == U"no") return "no";
    i = j;
  }
  return std::nullopt;
}

std::string normalize_boolean_reference(std::string_view reference) {
  std::string r = text::fold(reference);
  while (!r.empty() && (r.back() == '.' || r.back() == '!' || r.back() == '?')) r.pop_back();
  r = text::trim(r);
  if (r != "yes" && r != "no") {
    throw Error(ErrorCode::kData, fmt::format("boolean reference must be yes or no, got '{}'", reference));
  }
  return r;
}

int boolean_accuracy(std::string_view prediction, std::string_view reference) {
  const std::string expected = normalize_boolean_reference(reference);
  auto answer = extract_yes_no(prediction);
  return answer && *answer == expected ? 1 : 0;
}

int score_instance(const Instance& instance, std::string_view prediction, Metric metric) {
  if (metric == Metric::kStringContainment) return string_containment(prediction, instance.references);
  if (instance.references.empty()) {
    throw Error(ErrorCode::kData, fmt::format("({}, {}) has no reference", instance.group_id,
                                              instance.variant_id));
  }
  return boolean_accuracy(prediction, instance.references.front());
}

GroupScores make_group_scores(std::string group_id, int score_o,
                              std::vector<VariantScore> variant_scores) {
  if (variant_scores.empty()) {
    throw Error(ErrorCode::kData, fmt::format("group {} has no variant scores", group_id));
  }
  auto check = [&](int s) {
    if (s != 0 && s != 1) {
      throw Error(ErrorCode::kData, fmt::format("group {}: score {} is not binary", group_id, s));
    }
  };
  check(score_o);
  long sum = 0;
  for (const auto& v : variant_scores) {
    check(v.score);
    sum += v.score;
  }
  GroupScores gs;
  gs.group_id = std::move(group_id);
  gs.score_o = score_o;
  gs.score_p = static_cast<double>(sum) / static_cast<double>(variant_scores.size());
  gs.variant_scores = std::move(variant_scores);
  return gs;
}

std::optional<GroupScores> GroupScores::restricted_to(VariantType type) const {
  std::vector<VariantScore> subset;
  for (const auto& v : variant_scores)
    if (v.variant_type == type) subset.push_back(v);
  if (subset.empty()) return std::nullopt;
  return make_group_scores(group_id, score_o, std::move(subset));
}

GroupScores score_group(const PerturbationGroup& group,
                        const std::map<std::string, std::string, std::less<>>& predictions,
                        Metric metric) {
  auto prediction_for = [&](const Instance& instance) -> const std::string& {
    auto it = predictions.find(instance.variant_id);
    if (it == predictions.end()) {
      throw Error(ErrorCode::kData, fmt::format("missing prediction for ({}, {})", group.group_id,
                                                instance.variant_id));
    }
    return it->second;
  };
  const int score_o = score_instance(group.original, prediction_for(group.original), metric);
  std::vector<VariantScore> scores;
  scores.reserve(group.variants.size());
  for (const auto& v : group.variants) {
    scores.push_back({v.variant_id, v.variant_type, score_instance(v, prediction_for(v), metric)});
  }
  return make_group_scores(group.group_id, score_o, std::move(scores));
}

Json to_json(const Prediction& p) {
  return Json{{"group_id", p.group_id}, {"variant_id", p.variant_id}, {"model", p.model},
              {"completion", p.completion}};
}

std::vector<Prediction> read_predictions(const std::filesystem::path& path) {
  std::vector<Prediction> out;
  for (const auto& record : read_jsonl(path).records) {
    Prediction p;
    p.group_id = string_field(record, "group_id", path);
    p.variant_id = string_field(record, "variant_id", path);
    p.completion = string_field(record, "completion", path);
    if (auto it = record.value.find("model"); it != record.value.end() && it->is_string()) {
      p.model = it->get<std::string>();
    }
    out.push_back(std::move(p));
  }
  return out;
}

std::vector<ScoreRecord> read_scores(const std::filesystem::path& path) {
  std::vector<ScoreRecord> out;
  for (const auto& record : read_jsonl(path).records) {
    ScoreRecord r;
    r.group_id = string_field(record, "group_id", path);
    r.variant_id = string_field(record, "variant_id", path);
    auto it = record.value.find("score");
    if (it == record.value.end() || !it->is_number_integer() || (*it != 0 && *it != 1)) {
      throw Error(ErrorCode::kData,
                  fmt::format("{}:{}: score must be 0 or 1", path.string(), record.line_no));
    }
    r.score = it->get<int>();
    out.push_back(std::move(r));
  }
  return out;
}

void write_scores(const std::vector<GroupScores>& groups, const std::filesystem::path& path,
                  const std::optional<FileMeta>& meta) {
  std::vector<Json> records;
  for (const auto& g : groups) {
    records.push_back(Json{{"group_id", g.group_id}, {"variant_id", kOriginalVariantId}, {"score", g.score_o}});
    for (const auto& v : g.variant_scores) {
      records.push_back(Json{{"group_id", g.group_id}, {"variant_id", v.variant_id}, {"score", v.score}});
    }
  }
  write_jsonl(path, meta ? std::optional<Json>(meta->to_json()) : std::nullopt, records);
}

std::vector<GroupScores> assemble_group_scores(const Dataset& dataset,
                                               const std::vector<ScoreRecord>& records) {
  std::map<std::string, std::map<std::string, int, std::less<>>, std::less<>> by_group;
  for (const auto& r : records) {
    if (!dataset.find(r.group_id)) {
      throw Error(ErrorCode::kData, fmt::format("score for unknown group {}", r.group_id));
    }
    if (!by_group[r.group_id].emplace(r.variant_id, r.score).second) {
      throw Error(ErrorCode::kData, fmt::format("duplicate score for ({}, {})", r.group_id, r.variant_id));
    }
  }

  std::vector<GroupScores> out;
  for (const auto& g : dataset.groups) {
    auto it = by_group.find(g.group_id);
    if (it == by_group.end()) continue;
    const auto& scores = it->second;
    auto get = [&](const Instance& instance) {
      auto s = scores.find(instance.variant_id);
      if (s == scores.end()) {
        throw Error(ErrorCode::kData, fmt::format("incomplete scores: missing ({}, {})", g.group_id,
                                                  instance.variant_id));
      }
      return s->second;
    };
    if (scores.size() != g.variants.size() + 1) {
      for (const auto& [vid, _] : scores) {
        if (vid != kOriginalVariantId && !g.has_variant(vid)) {
          throw Error(ErrorCode::kData, fmt::format("score for unknown variant ({}, {})", g.group_id, vid));
        }
      }
    }
    const int score_o = get(g.original);
    std::vector<VariantScore> variant_scores;
    for (const auto& v : g.variants) variant_scores.push_back({v.variant_id, v.variant_type, get(v)});
    out.push_back(make_group_scores(g.group_id, score_o, std::move(variant_scores)));
  }
  return out;
}

}  // namespace robeval
