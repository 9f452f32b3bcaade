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

#include "robeval/pipeline.hpp"

#include <fstream>
#include <set>

#include <fmt/format.h>
#include <fmt/ranges.h>

#include "robeval/error.hpp"

namespace robeval {
namespace {

std::filesystem::path resolve(const std::filesystem::path& base, const std::filesystem::path& p) {
  return p.is_absolute() || base.empty() ? p : base / p;
}

std::filesystem::path path_or(const Json& value, const char* key, const std::filesystem::path& base,
                              const std::filesystem::path& fallback) {
  if (auto it = value.find(key); it != value.end() && it->is_string()) {
    return resolve(base, it->get<std::string>());
  }
  return fallback;
}

void ensure_dir(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::kIo, fmt::format("cannot create {}: {}", dir.string(), ec.message()));
}

FileMeta stage_meta(const RunConfig& config, std::string_view stage) {
  FileMeta meta = config.meta();
  meta.extra["stage"] = stage;
  return meta;
}

std::filesystem::path manifest_path(const RunConfig& config, std::string_view stage) {
  return config.out_dir / fmt::format("failures_{}.json", stage);
}

// Writes the failure manifest for an incomplete stage, or removes a stale
// one when the stage completed.
void settle_manifest(StageResult& result, const RunConfig& config, std::string_view stage,
                     const std::vector<GroupFailure>& failures) {
  const auto path = manifest_path(config, stage);
  if (failures.empty()) {
    std::error_code ec;
    std::filesystem::remove(path, ec);
    return;
  }
  std::set<std::string> groups;
  Json list = Json::array();
  for (const auto& f : failures) {
    groups.insert(f.group_id);
    list.push_back({{"group_id", f.group_id}, {"variant_id", f.variant_id}, {"error", f.error}});
  }
  Json manifest{{"stage", stage},
                {"meta", config.meta().to_json()},
                {"incomplete_groups", groups},
                {"failures", list}};
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out || !(out << manifest.dump(2) << '\n').flush()) {
    throw Error(ErrorCode::kIo, fmt::format("cannot write {}", path.string()));
  }
  result.complete = false;
  result.failure_manifest = path;
  result.summary["failures"] = failures.size();
  result.summary["incomplete_groups"] = groups.size();
  for (const auto& f : failures) {
    result.lines.push_back(f.variant_id.empty()
                               ? fmt::format("failed: group {}: {}", f.group_id, f.error)
                               : fmt::format("failed: ({}, {}): {}", f.group_id, f.variant_id, f.error));
  }
}

}  // namespace

Metric RunConfig::metric_for(DatasetKind kind) const {
  if (auto it = metrics.find(kind); it != metrics.end()) return it->second;
  return default_metric(kind);
}

FileMeta RunConfig::meta() const {
  FileMeta m;
  m.config_hash = config_hash;
  m.seed = seed;
  return m;
}

RunConfig RunConfig::from_json(const Json& value, const std::filesystem::path& base_dir) {
  if (!value.is_object()) throw Error(ErrorCode::kInvalidArgument, "run config must be a JSON object");
  RunConfig c;
  try {
    c.seed = value.value("seed", std::uint64_t{0});
    c.dataset = path_or(value, "dataset", base_dir, {});
    c.out_dir = path_or(value, "out", base_dir, resolve(base_dir, "."));
    c.expanded = path_or(value, "expanded", base_dir, c.out_dir / "expanded.jsonl");
    c.predictions = path_or(value, "predictions", base_dir, c.out_dir / "predictions.jsonl");
    c.scores = path_or(value, "scores", base_dir, c.out_dir / "scores.jsonl");
    c.cache = path_or(value, "cache", base_dir, c.out_dir / "cache.jsonl");

    Json perturb = value.value("perturb", Json::object());
    if (!perturb.contains("seed")) perturb["seed"] = c.seed;
    c.expansion = ExpansionConfig::from_json(perturb, base_dir);

    if (auto it = value.find("model"); it != value.end() && it->is_object()) {
      c.model = ModelConfig::from_json(*it);
    }

    const Json bootstrap = value.value("bootstrap", Json::object());
    c.bootstrap.replicates = bootstrap.value("replicates", std::size_t{1000});
    c.bootstrap.confidence = bootstrap.value("confidence", 0.95);
    c.bootstrap.seed = bootstrap.value("seed", c.seed);
    c.bootstrap.validate();

    const Json metrics = value.value("metrics", Json::object());
    for (const auto& [kind, metric] : metrics.items()) {
      c.metrics[parse_dataset_kind(kind)] = parse_metric(metric.get<std::string>());
    }
    const Json templates = value.value("templates", Json::object());
    for (const auto& [kind, tmpl] : templates.items()) {
      c.templates[parse_dataset_kind(kind)] = tmpl.get<std::string>();
    }

    const Json report = value.value("report", Json::object());
    if (auto it = report.find("filter"); it != report.end() && it->is_string()) {
      c.report_filter = parse_variant_filter(it->get<std::string>());
    }
    if (auto it = report.find("curve"); it != report.end() && it->is_array()) {
      if (it->size() != 2) throw Error(ErrorCode::kInvalidArgument, "report.curve must be [score_o, step]");
      c.curve = std::make_pair((*it)[0].get<double>(), (*it)[1].get<double>());
    }
    c.report_model = report.value("model", std::string{});
    c.report_dataset = report.value("dataset", std::string{});
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::kInvalidArgument, fmt::format("run config: {}", e.what()));
  }
  // File locations do not enter the hash.
  Json hashed = value;
  for (const char* key : {"dataset", "out", "expanded", "predictions", "scores", "cache"}) hashed.erase(key);
  c.config_hash = sha256_hex(hashed.dump());
  return c;
}

StageResult cmd_perturb(const RunConfig& config) {
  if (config.dataset.empty()) throw Error(ErrorCode::kInvalidArgument, "perturb: no input dataset configured");
  const Dataset raw = load_dataset(config.dataset, {.allow_unperturbed_groups = true});

  std::unique_ptr<HttpGenerator> generator;
  ParaphraseProvider provider;
  if (config.expansion.paraphrase_from_provider) {
    if (!config.model) throw Error(ErrorCode::kInvalidArgument, "paraphrase provider needs a model section");
    generator = std::make_unique<HttpGenerator>(*config.model);
    provider = [&](const Instance& original) {
      return paraphrase_provider(original.input, *generator, config.expansion.paraphrase_limit);
    };
  }

  ExpansionResult expanded = expand_dataset(raw, config.expansion, provider);
  ensure_dir(config.out_dir);
  write_dataset(expanded.dataset, config.expanded, stage_meta(config, "perturb"));

  StageResult result;
  std::vector<std::string> parts;
  auto count = [&](VariantType t, bool configured) {
    if (!configured) return;
    const std::size_t n = expanded.added.count(t) ? expanded.added.at(t) : 0;
    parts.push_back(fmt::format("{}: {}", to_string(t), n));
    result.summary[std::string(to_string(t))] = n;
  };
  count(VariantType::kSuperficial, config.expansion.superficial_count > 0);
  count(VariantType::kParaphrase, config.expansion.paraphrase_file || config.expansion.paraphrase_from_provider);
  count(VariantType::kDistraction, config.expansion.distraction.has_value());
  result.lines.push_back(parts.empty() ? std::string("no perturbations configured") : fmt::format("{}", fmt::join(parts, ", ")));
  for (const auto& w : expanded.warnings) result.lines.push_back("warning: " + w);
  result.summary["groups"] = expanded.dataset.groups.size();
  result.summary["output"] = config.expanded.string();
  settle_manifest(result, config, "perturb", expanded.failures);
  return result;
}

StageResult cmd_infer(const RunConfig& config, TextGenerator* generator) {
  if (!config.model) throw Error(ErrorCode::kInvalidArgument, "infer: no model section configured");
  config.model->validate();
  std::unique_ptr<HttpGenerator> http;
  if (generator == nullptr) {
    http = std::make_unique<HttpGenerator>(*config.model);
    generator = http.get();
  }
  const Dataset dataset = load_dataset(config.expanded);
  ensure_dir(config.out_dir);
  InferenceRun run = run_inference(dataset, *config.model, config.cache, *generator, config.templates);

  FileMeta meta = stage_meta(config, "infer");
  meta.extra["model"] = config.model->model_name;
  write_predictions(run.predictions, config.predictions, meta);

  StageResult result;
  result.summary["requests"] = run.requests_issued;
  result.summary["cache_hits"] = run.cache_hits;
  result.summary["retries"] = run.retries;
  result.summary["predictions"] = run.predictions.size();
  result.lines.push_back(run.requests_issued == 0
                             ? std::string("0 requests (all cached)")
                             : fmt::format("{} requests, {} cached, {} retries", run.requests_issued,
                                           run.cache_hits, run.retries));
  result.lines.push_back(fmt::format("{} predictions written to {}", run.predictions.size(),
                                     config.predictions.string()));
  std::vector<GroupFailure> failures;
  for (const auto& f : run.failures) failures.push_back({f.group_id, f.variant_id, f.error});
  settle_manifest(result, config, "infer", failures);
  return result;
}

StageResult cmd_score(const RunConfig& config) {
  const Dataset dataset = load_dataset(config.expanded);
  const std::vector<Prediction> predictions = read_predictions(config.predictions);

  std::set<std::string> models;
  for (const auto& p : predictions) models.insert(p.model);
  std::optional<std::string> model;
  if (config.model) {
    model = config.model->model_name;
  } else if (models.size() > 1) {
    throw Error(ErrorCode::kInvalidArgument,
                "predictions file holds several models; configure model.model_name to pick one");
  }

  std::map<std::string, std::map<std::string, std::string, std::less<>>, std::less<>> by_group;
  for (const auto& p : predictions) {
    if (model && p.model != *model) continue;
    if (!by_group[p.group_id].emplace(p.variant_id, p.completion).second) {
      throw Error(ErrorCode::kData, fmt::format("duplicate prediction for ({}, {})", p.group_id, p.variant_id));
    }
  }

  std::vector<GroupScores> scored;
  std::vector<GroupFailure> failures;
  const std::map<std::string, std::string, std::less<>> none;
  for (const auto& g : dataset.groups) {
    auto it = by_group.find(g.group_id);
    const auto& group_predictions = it == by_group.end() ? none : it->second;
    try {
      scored.push_back(score_group(g, group_predictions, config.metric_for(g.original.dataset_kind)));
    } catch (const Error& e) {
      failures.push_back({g.group_id, "", e.what()});
    }
  }

  ensure_dir(config.out_dir);
  FileMeta meta = stage_meta(config, "score");
  if (model) meta.extra["model"] = *model;
  write_scores(scored, config.scores, meta);

  StageResult result;
  std::size_t instances = 0;
  for (const auto& g : scored) instances += 1 + g.variant_scores.size();
  result.summary["groups_scored"] = scored.size();
  result.summary["instances_scored"] = instances;
  result.lines.push_back(fmt::format("scored {} groups ({} instances)", scored.size(), instances));
  settle_manifest(result, config, "score", failures);
  return result;
}

StageResult cmd_report(const RunConfig& config) {
  const Dataset dataset = load_dataset(config.expanded);
  const std::vector<GroupScores> groups = assemble_group_scores(dataset, read_scores(config.scores));
  if (groups.empty()) throw Error(ErrorCode::kData, "report: no scored groups");

  std::string model = config.report_model;
  if (model.empty() && config.model) model = config.model->model_name;
  if (model.empty()) {
    const auto meta = read_jsonl(config.scores).meta;
    if (meta && meta->contains("model") && (*meta)["model"].is_string()) model = (*meta)["model"].get<std::string>();
  }
  if (model.empty()) model = "model";
  const std::string dataset_name = config.report_dataset.empty() ? dataset.name : config.report_dataset;

  RobustnessReport report;
  if (config.report_filter) {
    report.rows.push_back(aggregate(groups, *config.report_filter, config.bootstrap, model, dataset_name));
  } else {
    report.rows = breakdown_by_type(groups, config.bootstrap, model, dataset_name);
  }

  ensure_dir(config.out_dir);
  const FileMeta meta = stage_meta(config, "report");
  write_report(report, ReportFormat::kJson, config.out_dir / "report.json", meta);
  write_report(report, ReportFormat::kCsv, config.out_dir / "report.csv", meta);
  write_report(report, ReportFormat::kMarkdown, config.out_dir / "report.md", meta);

  StageResult result;
  result.summary["rows"] = report.rows.size();
  result.summary["groups"] = groups.size();
  result.summary["skipped_groups"] = dataset.groups.size() - groups.size();
  result.lines.push_back(fmt::format("{} report rows over {} groups written to {}", report.rows.size(),
                                     groups.size(), (config.out_dir / "report.{json,csv,md}").string()));
  if (groups.size() != dataset.groups.size()) {
    result.lines.push_back(
        fmt::format("warning: {} groups have no scores", dataset.groups.size() - groups.size()));
  }

  if (config.curve) {
    const CorrelationCurve curve = correlation_curve(config.curve->first, config.curve->second);
    const auto path = config.out_dir / "curve.csv";
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out || !(out << render_curve_csv(curve, meta)).flush()) {
      throw Error(ErrorCode::kIo, fmt::format("cannot write {}", path.string()));
    }
    result.summary["curve_points"] = curve.points.size();
    result.summary["pearson_r"] = curve.pearson_r;
    result.lines.push_back(fmt::format("curve: {} points, pearson r = {:.4f}", curve.points.size(), curve.pearson_r));
  }
  return result;
}

}  // namespace robeval
