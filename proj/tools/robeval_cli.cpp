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

// robeval: perturb -> infer -> score -> report.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "robeval/robeval.h"

namespace {

using Json = nlohmann::json;

constexpr int kExitError = 1;
constexpr int kExitUsage = 2;
constexpr int kExitPartial = 3;

struct Options {
  std::string config_path;
  std::optional<unsigned long long> seed;
  std::string out_dir;

  std::string dataset;
  std::string predictions;
  std::string scores;
  std::string endpoint;
  std::string model;
  std::string filter;
  std::vector<double> curve;
};

std::string absolute(const std::string& p) { return std::filesystem::absolute(p).lexically_normal().string(); }

Json build_config(const Options& opts, const std::string& stage, std::string* base_dir) {
  Json config = Json::object();
  if (!opts.config_path.empty()) {
    std::ifstream in(opts.config_path);
    if (!in) throw std::runtime_error("cannot read config " + opts.config_path);
    config = Json::parse(in);
    *base_dir = std::filesystem::absolute(opts.config_path).parent_path().string();
  } else {
    *base_dir = std::filesystem::current_path().string();
  }

  if (opts.seed) {
    config["seed"] = *opts.seed;
    for (const char* section : {"perturb", "bootstrap"}) {
      if (config.contains(section) && config[section].is_object()) config[section].erase("seed");
    }
  }
  if (!opts.out_dir.empty()) config["out"] = absolute(opts.out_dir);
  if (!opts.dataset.empty()) config[stage == "perturb" ? "dataset" : "expanded"] = absolute(opts.dataset);
  if (!opts.predictions.empty()) config["predictions"] = absolute(opts.predictions);
  if (!opts.scores.empty()) config["scores"] = absolute(opts.scores);
  if (!opts.endpoint.empty()) config["model"]["endpoint_url"] = opts.endpoint;
  if (!opts.model.empty()) config["model"]["model_name"] = opts.model;
  if (!opts.filter.empty()) config["report"]["filter"] = opts.filter;
  if (!opts.curve.empty()) config["report"]["curve"] = opts.curve;
  return config;
}

int run_stage(const Options& opts, const std::string& stage) {
  std::string base_dir;
  Json config;
  try {
    config = build_config(opts, stage, &base_dir);
  } catch (const std::exception& e) {
    std::cerr << "robeval: error: " << e.what() << "\n";
    return kExitUsage;
  }

  robeval_run* run = nullptr;
  if (robeval_run_create(config.dump().c_str(), base_dir.c_str(), &run) != ROBEVAL_OK) {
    std::cerr << "robeval: error: " << robeval_last_error() << "\n";
    return kExitUsage;
  }

  char* summary = nullptr;
  robeval_status status = ROBEVAL_E_INTERNAL;
  if (stage == "perturb") {
    status = robeval_run_perturb(run, &summary);
  } else if (stage == "infer") {
    status = robeval_run_infer(run, &summary);
  } else if (stage == "score") {
    status = robeval_run_score(run, &summary);
  } else if (stage == "report") {
    status = robeval_run_report(run, &summary);
  }
  const std::string error = robeval_last_error();
  robeval_run_free(run);

  if (summary != nullptr) {
    const Json parsed = Json::parse(summary);
    robeval_string_free(summary);
    for (const auto& line : parsed.value("lines", Json::array())) std::cout << line.get<std::string>() << "\n";
  }
  if (status == ROBEVAL_OK) return 0;
  std::cerr << "robeval: error: " << error << "\n";
  return status == ROBEVAL_E_PARTIAL ? kExitPartial : kExitError;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"robeval - robustness evaluation under non-adversarial input perturbations"};
  app.set_version_flag("--version", std::string(robeval_version()));
  app.require_subcommand(1);
  app.fallthrough();

  Options opts;
  app.add_option("--config", opts.config_path, "Run configuration (JSON)")->check(CLI::ExistingFile);
  app.add_option("--seed", opts.seed, "Master seed; overrides every seed in the config");
  app.add_option("--out", opts.out_dir, "Output directory");

  auto* perturb = app.add_subcommand("perturb", "Expand a dataset with perturbed variants");
  perturb->add_option("--dataset", opts.dataset, "Raw Instance JSONL (originals)");

  auto* infer = app.add_subcommand("infer", "Collect model completions for every instance");
  infer->add_option("--dataset", opts.dataset, "Expanded Instance JSONL");
  infer->add_option("--endpoint", opts.endpoint, "Text-generation endpoint URL");
  infer->add_option("--model", opts.model, "Model name");

  auto* score = app.add_subcommand("score", "Score predictions against references");
  score->add_option("--dataset", opts.dataset, "Expanded Instance JSONL");
  score->add_option("--predictions", opts.predictions, "Predictions JSONL");
  score->add_option("--model", opts.model, "Only score predictions from this model");

  auto* report = app.add_subcommand("report", "Aggregate scores into robustness reports");
  report->add_option("--dataset", opts.dataset, "Expanded Instance JSONL");
  report->add_option("--scores", opts.scores, "Scores JSONL");
  report->add_option("--filter", opts.filter, "Variant filter")
      ->check(CLI::IsMember({"all", "superficial", "paraphrase", "distraction"}));
  report->add_option("--curve", opts.curve, "Emit the PDR / NCoH comparison curve: SCORE_O STEP")
      ->expected(2);

  CLI11_PARSE(app, argc, argv);

  for (auto* sub : {perturb, infer, score, report}) {
    if (sub->parsed()) return run_stage(opts, sub->get_name());
  }
  return kExitUsage;
}
