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

// Acceptance gate: one PASS/FAIL line per criterion. Exit status is nonzero
// when any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <set>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "fixture_oracle.hpp"
#include "mock_server.hpp"
#include "perturb_properties.hpp"
#include "robeval/error.hpp"
#include "robeval/metrics.hpp"
#include "robeval/pipeline.hpp"
#include "robeval/report.hpp"
#include "robeval/stats.hpp"
#include "temp_dir.hpp"

using namespace robeval;
using robeval::testing::fixture;
using robeval::testing::slurp;

namespace {

constexpr double kPi = std::numbers::pi;

// Collects failed checks for one criterion.
class Checker {
 public:
  void expect(bool ok, const std::string& what) {
    if (!ok) failures_.push_back(what);
  }
  void near(double got, double want, double tol, const std::string& what) {
    std::ostringstream msg;
    msg.precision(17);
    msg << what << ": got " << got << ", want " << want << " +- " << tol;
    expect(std::fabs(got - want) <= tol, msg.str());
  }
  const std::vector<std::string>& failures() const { return failures_; }

 private:
  std::vector<std::string> failures_;
};

struct Criterion {
  int id;
  std::string name;
  double budget_s;
  std::function<std::string(Checker&)> body;  // returns a one-line detail
};

std::string criterion_metric_points(Checker& c) {
  c.expect(*pdr(0.1, 0.8).value == -7.0, "pdr(0.1, 0.8) == -7");
  c.expect(*pdr(0.8, 0.1).value == 0.875, "pdr(0.8, 0.1) == 0.875");
  c.expect(*pdr(0.0, 0.0).value == 0.0, "pdr(0, 0) == 0");
  for (double x : {1e-9, 0.01, 0.5, 1.0}) c.expect(!pdr(0.0, x).defined(), "pdr(0, x>0) undefined");
  return "pdr(0.1,0.8)=-7, pdr(0.8,0.1)=0.875, pdr(0,0)=0, pdr(0,x>0) undefined";
}

std::string criterion_cohens_h(Checker& c) {
  const double a = cohens_h(0.8, 0.1).nh, b = cohens_h(0.8, 1.0).nh, d = cohens_h(0.6, 0.8).nh;
  c.near(a, -0.5, 1e-9, "NCoH(0.8, 0.1)");
  c.near(b, 0.295, 0.001, "NCoH(0.8, 1.0)");
  c.near(d, 0.141, 0.001, "NCoH(0.6, 0.8)");
  c.expect(b > 2 * d, "NCoH(0.8, 1.0) > 2 NCoH(0.6, 0.8)");
  char buf[160];
  std::snprintf(buf, sizeof buf, "NCoH(0.8,0.1)=%.12f NCoH(0.8,1.0)=%.4f NCoH(0.6,0.8)=%.4f", a, b, d);
  return buf;
}

std::string criterion_curve(Checker& c) {
  const auto curve = correlation_curve(1.0, 0.01);
  c.expect(curve.points.size() == 101, "101 grid points");
  c.expect(curve.pearson_r >= 0.99 && curve.pearson_r < 1.0, "pearson r in [0.99, 1.0)");
  c.near(curve.pearson_r, 0.995, 0.005, "pearson r target");
  char buf[96];
  std::snprintf(buf, sizeof buf, "pearson r = %.6f over %zu points", curve.pearson_r, curve.points.size());
  return buf;
}

std::string criterion_thresholds(Checker& c) {
  using E = EffectCategory;
  const std::vector<std::pair<double, E>> probes = {
      {0.0, E::kEssentiallyZero}, {0.0099, E::kEssentiallyZero}, {0.01, E::kVerySmall},
      {0.1999, E::kVerySmall},    {0.2, E::kSmall},              {0.4999, E::kSmall},
      {0.5, E::kMedium},          {0.7999, E::kMedium},          {0.8, E::kLarge},
      {1.1999, E::kLarge},        {1.2, E::kVeryLarge},          {1.9999, E::kVeryLarge},
      {2.0, E::kHuge},            {kPi, E::kHuge}};
  for (const auto& [h, want] : probes) {
    c.expect(classify_effect(h) == want, "classify(" + std::to_string(h) + ")");
    c.expect(classify_effect(-h) == want, "classify(-" + std::to_string(h) + ")");
  }
  const double raw[] = {0.0, 0.01, 0.2, 0.5, 0.8, 1.2, 2.0, kPi};
  const double printed[] = {0.0, 0.0032, 0.0637, 0.1592, 0.2546, 0.3820, 0.6366, 1.0};
  const auto bands = effect_thresholds();
  c.expect(bands.size() == 7, "seven bands");
  for (std::size_t i = 0; i < bands.size() && i < 7; ++i) {
    c.expect(bands[i].lower == raw[i] && bands[i].upper == raw[i + 1], "raw band " + std::to_string(i));
    c.near(bands[i].lower / kPi, raw[i] / kPi, 1e-12, "normalized lower " + std::to_string(i));
    c.near(bands[i].lower / kPi, printed[i], 5e-5, "printed normalized bound " + std::to_string(i));
  }
  c.near(bands[6].upper / kPi, 1.0, 1e-12, "normalized upper");
  return std::to_string(probes.size() * 2) + " probes, 7 bands";
}

std::string criterion_perturb_properties(Checker& c) {
  Rng rng(20240601);
  std::size_t checked = 0;
  for (SuperficialKind kind : all_superficial_kinds()) {
    for (int i = 0; i < 1000; ++i) {
      const std::string s = testing::random_sentence(rng);
      const std::string failure = testing::check_superficial_properties(kind, s, rng());
      c.expect(failure.empty(), std::string(to_string(kind)) + ": " + failure + " on '" + s + "'");
      ++checked;
    }
  }
  std::vector<std::string> corpus;
  for (int i = 0; i < 50; ++i) corpus.push_back(testing::random_sentence(rng));
  for (int i = 0; i < 1000; ++i) {
    PerturbationGroup g;
    g.group_id = "g" + std::to_string(i);
    g.original = Instance{.group_id = g.group_id, .variant_id = "o", .input = testing::random_sentence(rng),
                          .context = corpus[uniform_index(rng, corpus.size())], .references = {"yes"},
                          .dataset_kind = DatasetKind::kBoolQ};
    const auto placement = static_cast<Placement>(uniform_index(rng, 3));
    const std::string failure = testing::check_distraction_properties(g, corpus, {placement, rng()});
    c.expect(failure.empty(), "distraction: " + failure);
    ++checked;
  }
  return std::to_string(checked) + " seeded cases over 8 kinds + distraction";
}

std::string criterion_bootstrap(Checker& c) {
  const std::vector<double> flat{0.5, 0.5, 0.5, 0.5};
  const auto z = bootstrap_ci(flat, {1000, 0.95, 1});
  c.expect(z.lo == 0.5 && z.hi == 0.5 && z.mean == 0.5, "zero variance gives zero width");
  const std::vector<std::optional<double>> holes{0.2, std::nullopt, 0.8};
  const auto d = bootstrap_ci(holes, {1000, 0.95, 1});
  c.expect(d.n_used == 2 && d.n_undefined == 1, "undefined values discarded and counted");
  c.near(d.mean, 0.5, 1e-15, "mean over defined values");

  Rng rng(1);
  int covered = 0;
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> v;
    for (int i = 0; i < 50; ++i) v.push_back(uniform_index(rng, 10) < 7 ? 1.0 : 0.0);
    const auto ci = bootstrap_ci(v, {1000, 0.95, derive_seed(1, static_cast<std::uint64_t>(trial))});
    if (ci.lo <= 0.7 && 0.7 <= ci.hi) ++covered;
  }
  c.expect(covered >= 180, "coverage >= 90%");
  return "coverage " + std::to_string(covered) + "/200";
}

std::string criterion_fixture_end_to_end(Checker& c) {
  testing::TempDir dir;
  const Json cfg_json = {{"seed", 20240},
                         {"out", dir.path().string()},
                         {"expanded", fixture("ten_groups.jsonl").string()},
                         {"predictions", fixture("ten_groups_predictions.jsonl").string()}};
  const RunConfig cfg = RunConfig::from_json(cfg_json);
  c.expect(cmd_score(cfg).complete, "score stage complete");
  const auto got = read_scores(cfg.scores);
  const auto want = read_scores(fixture("ten_groups_expected_scores.jsonl"));
  c.expect(got.size() == want.size(), "score count");
  for (std::size_t i = 0; i < std::min(got.size(), want.size()); ++i) {
    c.expect(got[i].group_id == want[i].group_id && got[i].variant_id == want[i].variant_id &&
                 got[i].score == want[i].score,
             "hand label " + want[i].group_id + "/" + want[i].variant_id);
  }
  c.expect(cmd_report(cfg).complete, "report stage complete");
  const auto report = report_from_json(Json::parse(slurp(dir / "report.json")));
  c.expect(report.rows.size() == testing::kTenGroupOracle.size(), "four rows");
  std::size_t stars = 0;
  for (std::size_t i = 0; i < std::min(report.rows.size(), testing::kTenGroupOracle.size()); ++i) {
    const auto& row = report.rows[i];
    const auto& o = testing::kTenGroupOracle[i];
    const std::string tag(o.filter);
    c.expect(to_string(row.variant_filter) == o.filter, tag + " filter");
    c.expect(row.n_groups == o.n_groups, tag + " n_groups");
    c.near(row.mean_orig, o.mean_orig, 1e-9, tag + " mean_orig");
    c.near(row.mean_pert, o.mean_pert, 1e-9, tag + " mean_pert");
    c.near(row.nh_mean, o.nh_mean, 1e-9, tag + " nh_mean");
    c.near(row.anh_mean, o.anh_mean, 1e-9, tag + " anh_mean");
    c.expect(row.pdr_mean.has_value(), tag + " pdr defined");
    if (row.pdr_mean) c.near(*row.pdr_mean, o.pdr_mean, 1e-9, tag + " pdr_mean");
    c.expect(row.pdr_n_undefined == o.pdr_n_undefined, tag + " pdr_n_undefined");
    c.expect(row.nh_significant == (row.nh_lo > 0 || row.nh_hi < 0), tag + " nh star");
    c.expect(row.anh_significant == (row.anh_lo > 0 || row.anh_hi < 0), tag + " anh star");
    stars += row.nh_significant + row.anh_significant;
  }
  const std::string md = slurp(dir / "report.md");
  for (const auto& row : report.rows) {
    const std::string cell = "| " + format_cell(row.nh_mean, row.nh_significant) + " | " +
                             format_cell(row.anh_mean, row.anh_significant) + " |";
    c.expect(md.find(cell) != std::string::npos, "markdown cells " + std::string(to_string(row.variant_filter)));
  }
  return "4 rows match the oracle to 1e-9; " + std::to_string(stars) + " starred cells";
}

std::string criterion_mock_pipeline(Checker& c) {
  testing::MockEndpoint mock([](const std::string& prompt) {
    // Deterministic answer that depends on the prompt text only.
    const bool yes = (fnv1a64(prompt) & 3u) != 0;
    return std::pair{200, std::string(yes ? "Yes." : "No, it is not.")};
  });
  auto run_all = [&](const std::filesystem::path& out, std::size_t* requests_first, std::size_t* requests_second) {
    const Json cfg_json = {
        {"seed", 7},
        {"out", out.string()},
        {"dataset", fixture("three_groups_raw.jsonl").string()},
        {"perturb",
         {{"superficial", {{"count", 3}}},
          {"paraphrase", {{"source", fixture("three_groups_paraphrases.jsonl").string()}}}}},
        {"model", {{"endpoint_url", mock.url()}, {"model_name", "mock-model"}, {"max_parallel_requests", 4}}},
        {"report", {{"curve", {1.0, 0.01}}}}};
    const RunConfig cfg = RunConfig::from_json(cfg_json);
    c.expect(cmd_perturb(cfg).complete, "perturb complete");
    const auto first = cmd_infer(cfg);
    const auto second = cmd_infer(cfg);
    *requests_first = first.summary["requests"].get<std::size_t>();
    *requests_second = second.summary["requests"].get<std::size_t>();
    c.expect(first.complete && second.complete, "infer complete");
    c.expect(cmd_score(cfg).complete, "score complete");
    c.expect(cmd_report(cfg).complete, "report complete");
  };
  testing::TempDir a, b;
  std::size_t a1 = 0, a2 = 0, b1 = 0, b2 = 0;
  const int before = mock.requests();
  run_all(a.path(), &a1, &a2);
  const int after_a = mock.requests();
  run_all(b.path(), &b1, &b2);

  const Dataset expanded = load_dataset(a / "expanded.jsonl");
  std::set<std::string> prompts;
  for (const auto& g : expanded.groups) {
    prompts.insert(render_prompt(g.original));
    for (const auto& v : g.variants) prompts.insert(render_prompt(v));
  }
  c.expect(a1 == prompts.size(), "one request per distinct prompt");
  c.expect(a2 == 0, "second run served from cache");
  c.expect(static_cast<std::size_t>(after_a - before) == prompts.size(), "server saw one request per prompt");
  c.expect(CompletionCache(a / "cache.jsonl").size() == prompts.size(), "cache holds each prompt once");
  c.expect(b1 == a1 && b2 == 0, "fresh cache repeats the same request count");
  for (const char* f : {"expanded.jsonl", "predictions.jsonl", "scores.jsonl", "report.json", "report.csv",
                        "report.md", "curve.csv"}) {
    c.expect(slurp(a / f) == slurp(b / f), std::string(f) + " is byte-identical across runs");
  }
  return std::to_string(a1) + " requests then 0; outputs byte-identical across two fresh runs";
}

}  // namespace

int main() {
  const std::vector<Criterion> criteria = {
      {1, "metric point values", 1.0, criterion_metric_points},
      {2, "normalized Cohen's h point values", 1.0, criterion_cohens_h},
      {3, "PDR / NCoH correlation curve", 1.0, criterion_curve},
      {4, "effect-size threshold table", 1.0, criterion_thresholds},
      {5, "perturbation property suite", 10.0, criterion_perturb_properties},
      {6, "bootstrap behavior and coverage", 30.0, criterion_bootstrap},
      {7, "ten-group fixture end to end", 5.0, criterion_fixture_end_to_end},
      {8, "mock-endpoint determinism and cache soundness", 30.0, criterion_mock_pipeline},
  };
  int failed = 0;
  for (const auto& crit : criteria) {
    Checker checker;
    std::string detail;
    const auto start = std::chrono::steady_clock::now();
    try {
      detail = crit.body(checker);
    } catch (const std::exception& e) {
      checker.expect(false, std::string("exception: ") + e.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    checker.expect(secs < crit.budget_s, "runtime budget exceeded");
    const bool ok = checker.failures().empty();
    failed += ok ? 0 : 1;
    std::printf("[%s] criterion %d: %s (%.3f s) - %s\n", ok ? "PASS" : "FAIL", crit.id, crit.name.c_str(), secs,
                ok ? detail.c_str() : checker.failures().front().c_str());
    for (std::size_t i = 1; i < checker.failures().size() && i < 10; ++i) {
      std::printf("       also: %s\n", checker.failures()[i].c_str());
    }
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
