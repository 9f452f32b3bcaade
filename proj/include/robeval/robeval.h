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

#ifndef ROBEVAL_ROBEVAL_H_
#define ROBEVAL_ROBEVAL_H_

/*
 * C interface to the robeval robustness-evaluation toolkit.
 *
 * Every function returns a robeval_status; on failure the message is
 * available from robeval_last_error() until the next call on the same
 * thread. Strings returned through char** out-parameters are owned by the
 * caller and must be released with robeval_string_free().
 */

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(ROBEVAL_BUILDING_LIBRARY)
#    define ROBEVAL_API __declspec(dllexport)
#  else
#    define ROBEVAL_API __declspec(dllimport)
#  endif
#else
#  define ROBEVAL_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum robeval_status {
  ROBEVAL_OK = 0,
  ROBEVAL_E_INVALID_ARGUMENT = 1,
  ROBEVAL_E_IO = 2,
  ROBEVAL_E_PARSE = 3,
  ROBEVAL_E_DATA = 4,
  ROBEVAL_E_NETWORK = 5,
  ROBEVAL_E_PARTIAL = 6, /* stage finished for some groups only */
  ROBEVAL_E_UNDEFINED = 7,
  ROBEVAL_E_INTERNAL = 99
} robeval_status;

typedef enum robeval_effect_category {
  ROBEVAL_EFFECT_ESSENTIALLY_ZERO = 0,
  ROBEVAL_EFFECT_VERY_SMALL = 1,
  ROBEVAL_EFFECT_SMALL = 2,
  ROBEVAL_EFFECT_MEDIUM = 3,
  ROBEVAL_EFFECT_LARGE = 4,
  ROBEVAL_EFFECT_VERY_LARGE = 5,
  ROBEVAL_EFFECT_HUGE = 6
} robeval_effect_category;

typedef struct robeval_effect_size {
  double h;
  double nh;
  double anh;
  robeval_effect_category category;
} robeval_effect_size;

typedef struct robeval_bootstrap_config {
  size_t replicates;
  double confidence;
  uint64_t seed;
} robeval_bootstrap_config;

typedef struct robeval_interval {
  double mean;
  double lo;
  double hi;
  size_t n_used;
  size_t n_undefined;
  int degenerate;
} robeval_interval;

typedef struct robeval_dataset robeval_dataset;
typedef struct robeval_run robeval_run;

ROBEVAL_API const char* robeval_version(void);
ROBEVAL_API const char* robeval_last_error(void);
ROBEVAL_API void robeval_string_free(char* s);
ROBEVAL_API const char* robeval_effect_category_name(robeval_effect_category category);

/* Datasets (Instance JSONL). */
ROBEVAL_API robeval_status robeval_dataset_load(const char* path, int allow_unperturbed,
                                                robeval_dataset** out);
ROBEVAL_API robeval_status robeval_dataset_write(const robeval_dataset* dataset, const char* path);
ROBEVAL_API size_t robeval_dataset_group_count(const robeval_dataset* dataset);
ROBEVAL_API size_t robeval_dataset_instance_count(const robeval_dataset* dataset);
ROBEVAL_API void robeval_dataset_free(robeval_dataset* dataset);

/* Metrics. *defined is set to 0 when PDR is undefined. */
ROBEVAL_API robeval_status robeval_pdr(double score_o, double score_p, double* value, int* defined);
ROBEVAL_API robeval_status robeval_cohens_h(double score_o, double score_p, robeval_effect_size* out);
ROBEVAL_API robeval_status robeval_classify_effect(double h, robeval_effect_category* out);

/* Statistics. `defined` may be NULL (all values defined). */
ROBEVAL_API robeval_status robeval_bootstrap_ci(const double* values, const uint8_t* defined, size_t n,
                                                const robeval_bootstrap_config* config,
                                                robeval_interval* out);
ROBEVAL_API robeval_status robeval_pearson_r(const double* xs, const double* ys, size_t n, double* out);
ROBEVAL_API int robeval_significant(const robeval_interval* interval);

/* Scoring. */
ROBEVAL_API robeval_status robeval_string_containment(const char* prediction, const char* const* references,
                                                      size_t n_references, int* out);
ROBEVAL_API robeval_status robeval_boolean_accuracy(const char* prediction, const char* reference, int* out);

/* Perturbation. `kinds` are names such as "upper_case_all". */
ROBEVAL_API robeval_status robeval_apply_superficial(const char* text, const char* const* kinds,
                                                     size_t n_kinds, uint64_t seed, char** out);

/* Pipeline stages. The run is configured from a JSON document; relative
 * paths resolve against base_dir (may be NULL). Each stage writes a JSON
 * summary to *summary_json (may be NULL) even when it returns
 * ROBEVAL_E_PARTIAL. */
ROBEVAL_API robeval_status robeval_run_create(const char* config_json, const char* base_dir,
                                              robeval_run** out);
ROBEVAL_API void robeval_run_free(robeval_run* run);
ROBEVAL_API robeval_status robeval_run_perturb(robeval_run* run, char** summary_json);
ROBEVAL_API robeval_status robeval_run_infer(robeval_run* run, char** summary_json);
ROBEVAL_API robeval_status robeval_run_score(robeval_run* run, char** summary_json);
ROBEVAL_API robeval_status robeval_run_report(robeval_run* run, char** summary_json);

#ifdef __cplusplus
}
#endif

#endif /* ROBEVAL_ROBEVAL_H_ */
