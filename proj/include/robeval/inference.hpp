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

#include <chrono>
#include <cstddef>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include "robeval/dataset.hpp"
#include "robeval/scoring.hpp"

namespace robeval {

// Zero-shot prompt templates, one per dataset kind. {question} is replaced
// by the instance input and {passage} by its context.
std::string_view builtin_template(DatasetKind kind);

using TemplateOverrides = std::map<DatasetKind, std::string>;

std::string render_template(std::string_view tmpl, std::string_view question,
                            const std::optional<std::string>& passage);
std::string render_prompt(const Instance& instance, const TemplateOverrides& overrides = {});

enum class ApiStyle { kCompletion, kChat };

struct RetryPolicy {
  int max_retries = 3;
  std::chrono::milliseconds backoff{500};
  double backoff_factor = 2.0;
};

struct ModelConfig {
  std::string endpoint_url;
  std::string model_name;
  double temperature = 0.0;
  int max_new_tokens = 64;
  std::string auth_token_env;  // empty: no auth header
  std::size_t max_parallel_requests = 4;
  RetryPolicy retry;
  std::chrono::seconds timeout{60};
  ApiStyle api_style = ApiStyle::kCompletion;
  std::optional<std::string> system_prompt;  // never sent unless configured

  void validate() const;
  static ModelConfig from_json(const Json& value);
};

struct GenerateResult {
  std::string completion;
  int retries = 0;
};

class TextGenerator {
 public:
  virtual ~TextGenerator() = default;
  virtual GenerateResult generate(const std::string& prompt) = 0;
};

// JSON-over-HTTP generator. The auth token is read from the configured
// environment variable at construction, so a missing token fails before any
// request is made.
class HttpGenerator : public TextGenerator {
 public:
  explicit HttpGenerator(ModelConfig config);
  ~HttpGenerator() override;

  GenerateResult generate(const std::string& prompt) override;

  const ModelConfig& config() const { return config_; }

 private:
  ModelConfig config_;
  std::string scheme_host_port_;
  std::string path_;
  std::string token_;
};

Json build_request_body(const ModelConfig& config, const std::string& prompt);

// Accepts completion-style {choices:[{text}]}, chat-style
// {choices:[{message:{content}}]}, and flat {completion|text|generated_text}.
std::string extract_completion(const Json& body);

GenerateResult generate(const std::string& prompt, const ModelConfig& config);

std::string cache_key(std::string_view model_name, std::string_view prompt);

// Append-only JSONL cache of {key, prompt, completion}. A torn final line is
// ignored on open. Safe for concurrent lookup/append.
class CompletionCache {
 public:
  explicit CompletionCache(std::filesystem::path path);

  std::optional<std::string> lookup(const std::string& key) const;
  void append(const std::string& key, const std::string& prompt, const std::string& completion);
  std::size_t size() const;

 private:
  std::filesystem::path path_;
  mutable std::mutex mutex_;
  std::unordered_map<std::string, std::string> entries_;
};

struct InferenceFailure {
  std::string group_id;
  std::string variant_id;
  std::string error;
};

struct InferenceRun {
  std::vector<Prediction> predictions;  // dataset order
  std::size_t requests_issued = 0;
  std::size_t cache_hits = 0;
  std::size_t retries = 0;
  std::vector<InferenceFailure> failures;
  std::set<std::string> incomplete_groups;

  bool complete() const { return failures.empty(); }
};

InferenceRun run_inference(const Dataset& dataset, const ModelConfig& config,
                           const std::filesystem::path& cache_path, TextGenerator& generator,
                           const TemplateOverrides& overrides = {});

void write_predictions(const std::vector<Prediction>& predictions,
                       const std::filesystem::path& path,
                       const std::optional<FileMeta>& meta = std::nullopt);

std::string paraphrase_prompt(std::string_view text, std::size_t k);

// Asks the model for up to k paraphrases, one per line; list markers are
// stripped and candidates that fold to the input are dropped.
std::vector<std::string> paraphrase_provider(const std::string& text, TextGenerator& generator,
                                             std::size_t k);

}  // namespace robeval
