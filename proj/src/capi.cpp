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

#include "robeval/robeval.h"

#include <cstdlib>
#include <cstring>
#include <new>
#include <string>
#include <vector>

#include "robeval/dataset.hpp"
#include "robeval/error.hpp"
#include "robeval/metrics.hpp"
#include "robeval/perturb.hpp"
#include "robeval/pipeline.hpp"
#include "robeval/scoring.hpp"
#include "robeval/stats.hpp"

struct robeval_dataset {
  robeval::Dataset value;
};

struct robeval_run {
  robeval::RunConfig config;
};

namespace {

thread_local std::string g_last_error;

robeval_status fail(robeval_status status, const std::string& message) {
  g_last_error = message;
  return status;
}

robeval_status to_status(robeval::ErrorCode code) {
  switch (code) {
    case robeval::ErrorCode::kInvalidArgument:
      return ROBEVAL_E_INVALID_ARGUMENT;
    case robeval::ErrorCode::kIo:
      return ROBEVAL_E_IO;
    case robeval::ErrorCode::kParse:
      return ROBEVAL_E_PARSE;
    case robeval::ErrorCode::kData:
      return ROBEVAL_E_DATA;
    case robeval::ErrorCode::kNetwork:
      return ROBEVAL_E_NETWORK;
    case robeval::ErrorCode::kPartial:
      return ROBEVAL_E_PARTIAL;
    case robeval::ErrorCode::kUndefined:
      return ROBEVAL_E_UNDEFINED;
  }
  return ROBEVAL_E_INTERNAL;
}

template <typename F>
robeval_status guarded(F&& body) {
  try {
    g_last_error.clear();
    return body();
  } catch (const robeval::Error& e) {
    return fail(to_status(e.code()), e.what());
  } catch (const std::bad_alloc&) {
    return fail(ROBEVAL_E_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(ROBEVAL_E_INTERNAL, e.what());
  }
}

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (out == nullptr) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

robeval_status null_arg(const char* name) {
  return fail(ROBEVAL_E_INVALID_ARGUMENT, std::string("null argument: ") + name);
}

template <typename Stage>
robeval_status run_stage(robeval_run* run, char** summary_json, Stage stage) {
  if (run == nullptr) return null_arg("run");
  if (summary_json) *summary_json = nullptr;
  return guarded([&] {
    robeval::StageResult result = stage(run->config);
    robeval::Json summary = result.summary;
    summary["lines"] = result.lines;
    summary["complete"] = result.complete;
    if (result.failure_manifest) summary["failure_manifest"] = result.failure_manifest->string();
    if (summary_json) *summary_json = dup_string(summary.dump());
    if (!result.complete) {
      return fail(ROBEVAL_E_PARTIAL, "stage incomplete; see " +
                                         (result.failure_manifest ? result.failure_manifest->string()
                                                                  : std::string("summary")));
    }
    return ROBEVAL_OK;
  });
}

}  // namespace

extern "C" {

const char* robeval_version(void) { return ROBEVAL_VERSION_STRING; }

const char* robeval_last_error(void) { return g_last_error.c_str(); }

void robeval_string_free(char* s) { std::free(s); }

const char* robeval_effect_category_name(robeval_effect_category category) {
  if (category < ROBEVAL_EFFECT_ESSENTIALLY_ZERO || category > ROBEVAL_EFFECT_HUGE) return "";
  return robeval::to_string(static_cast<robeval::EffectCategory>(category)).data();
}

robeval_status robeval_dataset_load(const char* path, int allow_unperturbed, robeval_dataset** out) {
  if (path == nullptr) return null_arg("path");
  if (out == nullptr) return null_arg("out");
  *out = nullptr;
  return guarded([&] {
    robeval::LoadOptions options;
    options.allow_unperturbed_groups = allow_unperturbed != 0;
    *out = new robeval_dataset{robeval::load_dataset(path, options)};
    return ROBEVAL_OK;
  });
}

robeval_status robeval_dataset_write(const robeval_dataset* dataset, const char* path) {
  if (dataset == nullptr) return null_arg("dataset");
  if (path == nullptr) return null_arg("path");
  return guarded([&] {
    robeval::write_dataset(dataset->value, path);
    return ROBEVAL_OK;
  });
}

size_t robeval_dataset_group_count(const robeval_dataset* dataset) {
  return dataset ? dataset->value.groups.size() : 0;
}

size_t robeval_dataset_instance_count(const robeval_dataset* dataset) {
  return dataset ? dataset->value.instance_count() : 0;
}

void robeval_dataset_free(robeval_dataset* dataset) { delete dataset; }

robeval_status robeval_pdr(double score_o, double score_p, double* value, int* defined) {
  if (value == nullptr) return null_arg("value");
  if (defined == nullptr) return null_arg("defined");
  return guarded([&] {
    const robeval::PdrValue v = robeval::pdr(score_o, score_p);
    *defined = v.defined() ? 1 : 0;
    *value = v.value.value_or(0.0);
    return ROBEVAL_OK;
  });
}

robeval_status robeval_cohens_h(double score_o, double score_p, robeval_effect_size* out) {
  if (out == nullptr) return null_arg("out");
  return guarded([&] {
    const robeval::EffectSize e = robeval::cohens_h(score_o, score_p);
    *out = {e.h, e.nh, e.anh, static_cast<robeval_effect_category>(e.category)};
    return ROBEVAL_OK;
  });
}

robeval_status robeval_classify_effect(double h, robeval_effect_category* out) {
  if (out == nullptr) return null_arg("out");
  return guarded([&] {
    *out = static_cast<robeval_effect_category>(robeval::classify_effect(h));
    return ROBEVAL_OK;
  });
}

robeval_status robeval_bootstrap_ci(const double* values, const uint8_t* defined, size_t n,
                                    const robeval_bootstrap_config* config, robeval_interval* out) {
  if (values == nullptr && n > 0) return null_arg("values");
  if (config == nullptr) return null_arg("config");
  if (out == nullptr) return null_arg("out");
  return guarded([&] {
    std::vector<std::optional<double>> scores(n);
    for (size_t i = 0; i < n; ++i) {
      if (defined == nullptr || defined[i]) scores[i] = values[i];
    }
    const robeval::IntervalEstimate est = robeval::bootstrap_ci(
        scores, robeval::BootstrapConfig{config->replicates, config->confidence, config->seed});
    *out = {est.mean, est.lo, est.hi, est.n_used, est.n_undefined, est.degenerate ? 1 : 0};
    return ROBEVAL_OK;
  });
}

robeval_status robeval_pearson_r(const double* xs, const double* ys, size_t n, double* out) {
  if (xs == nullptr || ys == nullptr) return null_arg("xs/ys");
  if (out == nullptr) return null_arg("out");
  return guarded([&] {
    *out = robeval::pearson_r({xs, n}, {ys, n});
    return ROBEVAL_OK;
  });
}

int robeval_significant(const robeval_interval* interval) {
  if (interval == nullptr) return 0;
  robeval::IntervalEstimate est;
  est.lo = interval->lo;
  est.hi = interval->hi;
  return robeval::significant(est) ? 1 : 0;
}

robeval_status robeval_string_containment(const char* prediction, const char* const* references,
                                          size_t n_references, int* out) {
  if (prediction == nullptr) return null_arg("prediction");
  if (references == nullptr || n_references == 0) {
    return fail(ROBEVAL_E_INVALID_ARGUMENT, "references must be non-empty");
  }
  if (out == nullptr) return null_arg("out");
  return guarded([&] {
    std::vector<std::string> refs(references, references + n_references);
    *out = robeval::string_containment(prediction, refs);
    return ROBEVAL_OK;
  });
}

robeval_status robeval_boolean_accuracy(const char* prediction, const char* reference, int* out) {
  if (prediction == nullptr) return null_arg("prediction");
  if (reference == nullptr) return null_arg("reference");
  if (out == nullptr) return null_arg("out");
  return guarded([&] {
    *out = robeval::boolean_accuracy(prediction, reference);
    return ROBEVAL_OK;
  });
}

robeval_status robeval_apply_superficial(const char* text, const char* const* kinds, size_t n_kinds,
                                         uint64_t seed, char** out) {
  if (text == nullptr) return null_arg("text");
  if (kinds == nullptr && n_kinds > 0) return null_arg("kinds");
  if (out == nullptr) return null_arg("out");
  *out = nullptr;
  return guarded([&] {
    robeval::PerturbRecipe recipe;
    recipe.seed = seed;
    for (size_t i = 0; i < n_kinds; ++i) recipe.kinds.push_back(robeval::parse_superficial_kind(kinds[i]));
    *out = dup_string(robeval::apply_superficial(text, recipe));
    return ROBEVAL_OK;
  });
}

robeval_status robeval_run_create(const char* config_json, const char* base_dir, robeval_run** out) {
  if (config_json == nullptr) return null_arg("config_json");
  if (out == nullptr) return null_arg("out");
  *out = nullptr;
  return guarded([&] {
    robeval::Json value;
    try {
      value = robeval::Json::parse(config_json);
    } catch (const robeval::Json::parse_error& e) {
      return fail(ROBEVAL_E_PARSE, std::string("run config is not valid JSON: ") + e.what());
    }
    *out = new robeval_run{robeval::RunConfig::from_json(value, base_dir ? base_dir : "")};
    return ROBEVAL_OK;
  });
}

void robeval_run_free(robeval_run* run) { delete run; }

robeval_status robeval_run_perturb(robeval_run* run, char** summary_json) {
  return run_stage(run, summary_json, [](const robeval::RunConfig& c) { return robeval::cmd_perturb(c); });
}

robeval_status robeval_run_infer(robeval_run* run, char** summary_json) {
  return run_stage(run, summary_json, [](const robeval::RunConfig& c) { return robeval::cmd_infer(c); });
}

robeval_status robeval_run_score(robeval_run* run, char** summary_json) {
  return run_stage(run, summary_json, [](const robeval::RunConfig& c) { return robeval::cmd_score(c); });
}

robeval_status robeval_run_report(robeval_run* run, char** summary_json) {
  return run_stage(run, summary_json, [](const robeval::RunConfig& c) { return robeval::cmd_report(c); });
}

}  // extern "C"
