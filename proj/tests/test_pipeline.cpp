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

#include <fstream>

#include "doctest.h"
#include "mock_server.hpp"
#include "robeval/error.hpp"
#include "robeval/pipeline.hpp"
#include "temp_dir.hpp"

using namespace robeval;
using robeval::testing::MockEndpoint;
using robeval::testing::TempDir;
using robeval::testing::fixture;
using robeval::testing::slurp;

namespace {

RunConfig config_from(const std::string& json) { return RunConfig::from_json(Json::parse(json)); }

std::string dir_json(const TempDir& dir) { return Json(dir.path().string()).dump(); }

std::size_t count_lines(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::size_t n = 0;
  for (std::string line; std::getline(in, line);) {
    if (!line.empty() && !line.starts_with("{\"_meta\"")) ++n;
  }
  return n;
}

}  // namespace

TEST_CASE("perturb stage summary and determinism") {
  TempDir dir;
  const std::string json = R"({"seed": 5, "out": )" + dir_json(dir) + R"(, "dataset": ")" +
                           fixture("three_groups_raw.jsonl").string() +
                           R"(", "perturb": {"superficial": {"count": 3}, "paraphrase": {"source": ")" +
                           fixture("three_groups_paraphrases.jsonl").string() + R"("}}})";
  const auto cfg = config_from(json);
  const auto r = cmd_perturb(cfg);
  REQUIRE_FALSE(r.lines.empty());
  CHECK(r.lines[0] == "superficial: 9, paraphrase: 6");
  CHECK(r.complete);
  const std::string first = slurp(cfg.expanded);
  cmd_perturb(cfg);
  CHECK(slurp(cfg.expanded) == first);
  CHECK(first.starts_with("{\"_meta\":"));
  CHECK(first.find(cfg.config_hash) != std::string::npos);
}

TEST_CASE("distraction on a dataset without passages is a precondition error") {
  TempDir dir;
  const auto cfg = config_from(R"({"out": )" + dir_json(dir) + R"(, "dataset": ")" +
                               fixture("three_groups_raw.jsonl").string() +
                               R"(", "perturb": {"distraction": {"placement": "after"}}})");
  CHECK_THROWS_WITH_AS(cmd_perturb(cfg), doctest::Contains("distraction requires a context passage"), Error);
}

TEST_CASE("infer, score and report end to end with a mock endpoint") {
  TempDir dir;
  MockEndpoint mock([](const std::string& prompt) {
    return std::pair{200, std::string(prompt.find("never") != std::string::npos ? "No." : "Yes")};
  });
  const std::string json = R"({"seed": 3, "out": )" + dir_json(dir) + R"(, "expanded": ")" +
                           fixture("ten_groups.jsonl").string() + R"(", "model": {"endpoint_url": ")" + mock.url() +
                           R"(", "model_name": "mock-model", "backoff_ms": 1}, "report": {"curve": [1.0, 0.01]}})";
  const auto cfg = config_from(json);
  const auto infer = cmd_infer(cfg);
  CHECK(infer.complete);
  CHECK(count_lines(cfg.predictions) == load_dataset(cfg.expanded).instance_count());
  const int requests = mock.requests();
  const std::string predictions = slurp(cfg.predictions);

  const auto again = cmd_infer(cfg);
  CHECK(again.lines[0] == "0 requests (all cached)");
  CHECK(mock.requests() == requests);
  CHECK(slurp(cfg.predictions) == predictions);

  CHECK(cmd_score(cfg).complete);
  const std::string scores = slurp(cfg.scores);
  cmd_score(cfg);
  CHECK(slurp(cfg.scores) == scores);

  const auto report = cmd_report(cfg);
  CHECK(report.summary["curve_points"] == 101);
  const std::string md = slurp(dir / "report.md");
  CHECK(md.find("| mock-model | ten_groups | all |") != std::string::npos);
  CHECK(count_lines(dir / "curve.csv") > 101);
  const std::string csv = slurp(dir / "report.csv");
  cmd_report(cfg);
  CHECK(slurp(dir / "report.csv") == csv);
}

TEST_CASE("score stage reproduces the hand labels and flags missing predictions") {
  TempDir dir;
  const std::string base = R"({"out": )" + dir_json(dir) + R"(, "expanded": ")" +
                           fixture("ten_groups.jsonl").string() + R"(", "predictions": ")";
  const auto cfg = config_from(base + fixture("ten_groups_predictions.jsonl").string() + "\"}");
  CHECK(cmd_score(cfg).complete);
  const auto got = read_scores(cfg.scores);
  const auto want = read_scores(fixture("ten_groups_expected_scores.jsonl"));
  REQUIRE(got.size() == want.size());
  for (std::size_t i = 0; i < got.size(); ++i) {
    CHECK(got[i].group_id == want[i].group_id);
    CHECK(got[i].variant_id == want[i].variant_id);
    CHECK(got[i].score == want[i].score);
  }
  CHECK_FALSE(std::filesystem::exists(dir / "failures_score.json"));

  std::ifstream in(fixture("ten_groups_predictions.jsonl"));
  std::ofstream out(dir / "partial.jsonl");
  for (std::string line; std::getline(in, line);) {
    if (line.find(R"("group_id": "g03", "variant_id": "p1")") == std::string::npos) out << line << "\n";
  }
  out.close();
  const auto partial = cmd_score(config_from(base + (dir / "partial.jsonl").string() + "\"}"));
  CHECK_FALSE(partial.complete);
  REQUIRE(partial.failure_manifest);
  CHECK(slurp(*partial.failure_manifest).find("(g03, p1)") != std::string::npos);
}

TEST_CASE("all-correct predictions score 1 everywhere") {
  TempDir dir;
  const Dataset d = load_dataset(fixture("ten_groups.jsonl"));
  {
    std::ofstream out(dir / "p.jsonl");
    auto emit = [&](const Instance& i) {
      out << Json{{"group_id", i.group_id}, {"variant_id", i.variant_id}, {"model", "m"},
                  {"completion", i.references[0]}}.dump() << "\n";
    };
    for (const auto& g : d.groups) {
      emit(g.original);
      for (const auto& v : g.variants) emit(v);
    }
  }
  const auto cfg = config_from(R"({"out": )" + dir_json(dir) + R"(, "expanded": ")" +
                               fixture("ten_groups.jsonl").string() + R"(", "predictions": ")" +
                               (dir / "p.jsonl").string() + "\"}");
  cmd_score(cfg);
  for (const auto& r : read_scores(cfg.scores)) CHECK(r.score == 1);
}

TEST_CASE("report filter emits only the requested rows") {
  TempDir dir;
  const auto cfg = config_from(R"({"out": )" + dir_json(dir) + R"(, "expanded": ")" +
                               fixture("ten_groups.jsonl").string() + R"(", "scores": ")" +
                               fixture("ten_groups_expected_scores.jsonl").string() +
                               R"(", "report": {"filter": "paraphrase"}})");
  cmd_report(cfg);
  const auto report = report_from_json(Json::parse(slurp(dir / "report.json")));
  REQUIRE(report.rows.size() == 1);
  CHECK(report.rows[0].variant_filter == VariantFilter::kParaphrase);
}

TEST_CASE("run config parsing") {
  const auto cfg = RunConfig::from_json(Json::parse(R"({"seed": 12, "out": "o", "metrics": {"custom": "boolean_accuracy"},
    "bootstrap": {"replicates": 200}})"), "/base");
  CHECK(cfg.out_dir == std::filesystem::path("/base/o"));
  CHECK(cfg.scores == std::filesystem::path("/base/o/scores.jsonl"));
  CHECK(cfg.bootstrap.seed == 12);
  CHECK(cfg.bootstrap.replicates == 200);
  CHECK(cfg.expansion.seed == 12);
  CHECK(cfg.metric_for(DatasetKind::kCustom) == Metric::kBooleanAccuracy);
  CHECK(cfg.metric_for(DatasetKind::kPopQA) == Metric::kStringContainment);
  CHECK(cfg.config_hash.size() == 64);
  CHECK_THROWS_AS(RunConfig::from_json(Json::parse(R"({"report": {"curve": [1.0]}})")), Error);
}
