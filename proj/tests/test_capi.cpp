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

#include <sys/wait.h>

#include <array>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <string>

#include "doctest.h"
#include "json.hpp"
#include "mock_server.hpp"
#include "robeval/robeval.h"
#include "temp_dir.hpp"

using robeval::testing::MockEndpoint;
using robeval::testing::TempDir;
using robeval::testing::fixture;
using robeval::testing::slurp;

namespace {

struct CliResult {
  int exit_code = -1;
  std::string output;
};

CliResult run_cli(const std::string& args) {
  const std::string cmd = std::string("'") + ROBEVAL_CLI_PATH + "' " + args + " 2>&1";
  CliResult r;
  FILE* pipe = ::popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  std::array<char, 4096> buf{};
  while (std::fgets(buf.data(), static_cast<int>(buf.size()), pipe) != nullptr) r.output += buf.data();
  const int status = ::pclose(pipe);
  r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string q(const std::filesystem::path& p) { return "'" + p.string() + "'"; }

std::size_t data_lines(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::size_t n = 0;
  for (std::string line; std::getline(in, line);) {
    if (!line.empty() && line[0] != '#' && !line.starts_with("{\"_meta\"")) ++n;
  }
  return n;
}

}  // namespace

TEST_CASE("c api: metrics") {
  double v = 0;
  int defined = -1;
  CHECK(robeval_pdr(0.1, 0.8, &v, &defined) == ROBEVAL_OK);
  CHECK(defined == 1);
  CHECK(v == -7.0);
  CHECK(robeval_pdr(0.0, 0.5, &v, &defined) == ROBEVAL_OK);
  CHECK(defined == 0);
  CHECK(robeval_pdr(2.0, 0.5, &v, &defined) == ROBEVAL_E_INVALID_ARGUMENT);
  CHECK(std::string(robeval_last_error()).size() > 0);

  robeval_effect_size e{};
  CHECK(robeval_cohens_h(0.8, 0.1, &e) == ROBEVAL_OK);
  CHECK(std::fabs(e.nh + 0.5) < 1e-12);
  CHECK(e.category == ROBEVAL_EFFECT_VERY_LARGE);
  CHECK(std::string(robeval_effect_category_name(e.category)) == "very_large");
  robeval_effect_category c{};
  CHECK(robeval_classify_effect(0.2, &c) == ROBEVAL_OK);
  CHECK(c == ROBEVAL_EFFECT_SMALL);
  CHECK(robeval_classify_effect(4.0, &c) == ROBEVAL_E_INVALID_ARGUMENT);
  CHECK(std::string(robeval_version()).size() > 0);
}

TEST_CASE("c api: statistics") {
  const double values[] = {0.2, 0.0, 0.8};
  const std::uint8_t defined[] = {1, 0, 1};
  const robeval_bootstrap_config cfg{1000, 0.95, 1};
  robeval_interval out{};
  CHECK(robeval_bootstrap_ci(values, defined, 3, &cfg, &out) == ROBEVAL_OK);
  CHECK(out.n_used == 2);
  CHECK(out.n_undefined == 1);
  const std::uint8_t none[] = {0, 0, 0};
  CHECK(robeval_bootstrap_ci(values, none, 3, &cfg, &out) == ROBEVAL_E_UNDEFINED);
  CHECK(robeval_bootstrap_ci(values, nullptr, 3, nullptr, &out) == ROBEVAL_E_INVALID_ARGUMENT);

  const double xs[] = {1, 2, 3}, ys[] = {2, 4, 6};
  double r = 0;
  CHECK(robeval_pearson_r(xs, ys, 3, &r) == ROBEVAL_OK);
  CHECK(r == doctest::Approx(1.0));
  const robeval_interval neg{-0.02, -0.03, -0.01, 5, 0, 0};
  CHECK(robeval_significant(&neg) == 1);
}

TEST_CASE("c api: scoring and perturbation") {
  const char* refs[] = {"Steven Spielberg", "S. Spielberg"};
  int s = -1;
  CHECK(robeval_string_containment("answer: steven spielberg", refs, 2, &s) == ROBEVAL_OK);
  CHECK(s == 1);
  CHECK(robeval_boolean_accuracy("No.", "no", &s) == ROBEVAL_OK);
  CHECK(s == 1);

  const char* kinds[] = {"first_letter_case_flip", "remove_terminal_punctuation"};
  char* out = nullptr;
  CHECK(robeval_apply_superficial("is the derivative of a continuous function always continuous?", kinds, 2, 0,
                                  &out) == ROBEVAL_OK);
  REQUIRE(out != nullptr);
  CHECK(std::string(out) == "Is the derivative of a continuous function always continuous");
  robeval_string_free(out);
  const char* bad[] = {"shout"};
  CHECK(robeval_apply_superficial("x", bad, 1, 0, &out) == ROBEVAL_E_INVALID_ARGUMENT);
  CHECK(robeval_apply_superficial(nullptr, kinds, 2, 0, &out) == ROBEVAL_E_INVALID_ARGUMENT);
}

TEST_CASE("c api: datasets") {
  TempDir dir;
  robeval_dataset* d = nullptr;
  REQUIRE(robeval_dataset_load(fixture("three_groups.jsonl").c_str(), 0, &d) == ROBEVAL_OK);
  CHECK(robeval_dataset_group_count(d) == 3);
  CHECK(robeval_dataset_instance_count(d) == 9);
  CHECK(robeval_dataset_write(d, (dir / "out.jsonl").c_str()) == ROBEVAL_OK);
  robeval_dataset_free(d);
  CHECK(robeval_dataset_load(fixture("three_groups_raw.jsonl").c_str(), 0, &d) == ROBEVAL_E_DATA);
  CHECK(std::string(robeval_last_error()).find("no perturbed variants") != std::string::npos);
  CHECK(robeval_dataset_load((dir / "missing.jsonl").c_str(), 0, &d) == ROBEVAL_E_IO);
}

TEST_CASE("c api: run stages") {
  TempDir dir;
  const nlohmann::json cfg = {{"out", dir.path().string()},
                              {"expanded", fixture("ten_groups.jsonl").string()},
                              {"scores", fixture("ten_groups_expected_scores.jsonl").string()}};
  robeval_run* run = nullptr;
  REQUIRE(robeval_run_create(cfg.dump().c_str(), nullptr, &run) == ROBEVAL_OK);
  char* summary = nullptr;
  CHECK(robeval_run_report(run, &summary) == ROBEVAL_OK);
  REQUIRE(summary != nullptr);
  const auto parsed = nlohmann::json::parse(summary);
  robeval_string_free(summary);
  CHECK(parsed["complete"] == true);
  CHECK(parsed["rows"] == 4);
  robeval_run_free(run);
  CHECK(robeval_run_create("{not json", nullptr, &run) != ROBEVAL_OK);
}

TEST_CASE("cli: perturb summary, determinism and precondition errors") {
  TempDir dir;
  {
    std::ofstream cfg(dir / "run.json");
    cfg << nlohmann::json{{"seed", 5},
                          {"dataset", fixture("three_groups_raw.jsonl").string()},
                          {"perturb",
                           {{"superficial", {{"count", 3}}},
                            {"paraphrase", {{"source", fixture("three_groups_paraphrases.jsonl").string()}}}}}}
               .dump();
  }
  const auto r = run_cli("--config " + q(dir / "run.json") + " --out " + q(dir / "a") + " perturb");
  CHECK(r.exit_code == 0);
  CHECK(r.output.find("superficial: 9, paraphrase: 6") != std::string::npos);
  CHECK(r.output.find("q9") != std::string::npos);
  const std::string first = slurp(dir / "a" / "expanded.jsonl");
  run_cli("--config " + q(dir / "run.json") + " --out " + q(dir / "a") + " perturb");
  CHECK(slurp(dir / "a" / "expanded.jsonl") == first);
  run_cli("--config " + q(dir / "run.json") + " --seed 6 --out " + q(dir / "a") + " perturb");
  const std::string reseeded = slurp(dir / "a" / "expanded.jsonl");
  CHECK(reseeded != first);
  CHECK(reseeded.find("\"seed\":6") != std::string::npos);

  const auto bad = run_cli("--out " + q(dir / "d") + " perturb --dataset " + q(fixture("three_groups_raw.jsonl")));
  CHECK(bad.exit_code == 0);
  CHECK(bad.output.find("no perturbations configured") != std::string::npos);
  {
    std::ofstream cfg(dir / "distract.json");
    cfg << R"({"perturb": {"distraction": {"placement": "after"}}})";
  }
  const auto d = run_cli("--config " + q(dir / "distract.json") + " --out " + q(dir / "e") + " perturb --dataset " +
                         q(fixture("three_groups_raw.jsonl")));
  CHECK(d.exit_code != 0);
  CHECK(d.output.find("distraction requires a context passage") != std::string::npos);
}

TEST_CASE("cli: infer against a mock endpoint, cache, and auth fail-fast") {
  TempDir dir;
  MockEndpoint mock([](const std::string& prompt) {
    return std::pair{200, std::string(prompt.size() % 2 == 0 ? "Yes" : "No")};
  });
  const std::string base = "--out " + q(dir.path()) + " infer --dataset " + q(fixture("ten_groups.jsonl")) +
                           " --endpoint " + mock.url() + " --model mock-model";
  const auto first = run_cli(base);
  CHECK(first.exit_code == 0);
  CHECK(data_lines(dir / "predictions.jsonl") == 41);
  const int requests = mock.requests();
  CHECK(requests > 0);
  const std::string predictions = slurp(dir / "predictions.jsonl");
  const auto second = run_cli(base);
  CHECK(second.exit_code == 0);
  CHECK(second.output.find("0 requests (all cached)") != std::string::npos);
  CHECK(mock.requests() == requests);
  CHECK(slurp(dir / "predictions.jsonl") == predictions);

  {
    std::ofstream cfg(dir / "auth.json");
    cfg << R"({"model": {"auth_token_env": "ROBEVAL_TEST_TOKEN_THAT_IS_NOT_SET"}})";
  }
  ::unsetenv("ROBEVAL_TEST_TOKEN_THAT_IS_NOT_SET");
  const auto auth = run_cli("--config " + q(dir / "auth.json") + " --out " + q(dir / "x") + " infer --dataset " +
                            q(fixture("ten_groups.jsonl")) + " --endpoint " + mock.url() + " --model other");
  CHECK(auth.exit_code != 0);
  CHECK(auth.output.find("ROBEVAL_TEST_TOKEN_THAT_IS_NOT_SET") != std::string::npos);
  CHECK(mock.requests() == requests);
}

TEST_CASE("cli: score and report") {
  TempDir dir;
  const std::string ds = " --dataset " + q(fixture("ten_groups.jsonl"));
  const auto s = run_cli("--out " + q(dir.path()) + " score" + ds + " --predictions " +
                         q(fixture("ten_groups_predictions.jsonl")) + " --model mock-model");
  CHECK(s.exit_code == 0);
  CHECK(data_lines(dir / "scores.jsonl") == 41);

  {
    std::ifstream in(fixture("ten_groups_predictions.jsonl"));
    std::ofstream out(dir / "partial.jsonl");
    for (std::string line; std::getline(in, line);) {
      if (line.find(R"("group_id": "g06", "variant_id": "d1")") == std::string::npos) out << line << "\n";
    }
  }
  const auto partial = run_cli("--out " + q(dir / "p") + " score" + ds + " --predictions " + q(dir / "partial.jsonl"));
  CHECK(partial.exit_code == 3);
  CHECK(partial.output.find("(g06, d1)") != std::string::npos);
  CHECK(std::filesystem::exists(dir / "p" / "failures_score.json"));

  const auto rep = run_cli("--out " + q(dir.path()) + " report" + ds + " --scores " + q(dir / "scores.jsonl") +
                           " --curve 1.0 0.01");
  CHECK(rep.exit_code == 0);
  CHECK(data_lines(dir / "report.csv") == 5);
  CHECK(data_lines(dir / "curve.csv") == 102);
  const std::string md = slurp(dir / "report.md");
  CHECK(md.find("| mock-model | ten_groups | paraphrase |") != std::string::npos);

  const auto filtered = run_cli("--out " + q(dir / "f") + " report" + ds + " --scores " + q(dir / "scores.jsonl") +
                                " --filter paraphrase");
  CHECK(filtered.exit_code == 0);
  CHECK(data_lines(dir / "f" / "report.csv") == 2);
  const std::string csv = slurp(dir / "f" / "report.csv");
  CHECK(csv.find(",superficial,") == std::string::npos);
  CHECK(csv.find(",paraphrase,") != std::string::npos);

  CHECK(run_cli("report --filter bogus").exit_code != 0);
  CHECK(run_cli("").exit_code != 0);
}
