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

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "robeval/inference.hpp"
#include "robeval/perturb.hpp"
#include "robeval/report.hpp"
#include "robeval/scoring.hpp"
#include "robeval/stats.hpp"

namespace robeval {

// Everything needed to run one stage, parsed from a single JSON document.
// Paths default to fixed names inside `out_dir`.
struct RunConfig {
  std::filesystem::path dataset;  // raw input of the perturb stage
  std::filesystem::path out_dir = ".";
  std::filesystem::path expanded;
  std::filesystem::path predictions;
  std::filesystem::path scores;
  std::filesystem::path cache;

  std::uint64_t seed = 0;
  ExpansionConfig expansion;
  std::optional<ModelConfig> model;
  BootstrapConfig bootstrap;
  std::map<DatasetKind, Metric> metrics;
  TemplateOverrides templates;

  std::optional<VariantFilter> report_filter;
  std::optional<std::pair<double, double>> curve;  // (score_o, grid_step)
  std::string report_model;    // default: model.model_name, then "model"
  std::string report_dataset;  // default: dataset name

  std::string config_hash;

  Metric metric_for(DatasetKind kind) const;
  FileMeta meta() const;

  static RunConfig from_json(const Json& value, const std::filesystem::path& base_dir = {});
};

struct StageResult {
  Json summary = Json::object();
  std::vector<std::string> lines;  // human-readable summary
  bool complete = true;
  std::optional<std::filesystem::path> failure_manifest;
};

StageResult cmd_perturb(const RunConfig& config);
// `generator` overrides the HTTP client (used by tests and embedders).
StageResult cmd_infer(const RunConfig& config, TextGenerator* generator = nullptr);
StageResult cmd_score(const RunConfig& config);
StageResult cmd_report(const RunConfig& config);

}  // namespace robeval
