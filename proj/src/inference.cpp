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

#include "robeval/inference.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iterator>
#include <regex>
#include <thread>

#include <fmt/format.h>
#include <httplib.h>

#include "robeval/error.hpp"
#include "robeval/text.hpp"

namespace robeval {
namespace {

constexpr std::string_view kBoolQTemplate =
    "Context: {passage}\nBased on the context, answer the following question with a single word: "
    "yes or no. Question: {question}\nAnswer:";
constexpr std::string_view kPopQATemplate = "Question: {question}\nAnswer:";
constexpr std::string_view kSIGATemplate =
    "Does the following statement contain abusive or unfair negative opinion against some social "
    "identity group? Answer with yes or no.\nStatement: {question}\nAnswer:";

bool is_transient(int status) { return status == 408 || status == 429 || status >= 500; }

}  // namespace

std::string_view builtin_template(DatasetKind kind) {
  switch (kind) {
    case DatasetKind::kBoolQ:
      return kBoolQTemplate;
    case DatasetKind::kPopQA:
      return kPopQATemplate;
    case DatasetKind::kSIGA:
      return kSIGATemplate;
    case DatasetKind::kCustom:
      break;
  }
  return {};
}

std::string render_template(std::string_view tmpl, std::string_view question,
                            const std::optional<std::string>& passage) {
  constexpr std::string_view kQuestion = "{question}";
  constexpr std::string_view kPassage = "{passage}";
  std::string out;
  out.reserve(tmpl.size() + question.size() + (passage ? passage->size() : 0));
  std::size_t i = 0;
  while (i < tmpl.size()) {
    if (tmpl.substr(i, kQuestion.size()) == kQuestion) {
      out += question;
      i += kQuestion.size();
    } else if (tmpl.substr(i, kPassage.size()) == kPassage) {
      if (!passage) throw Error(ErrorCode::kData, "prompt template needs a passage but the instance has no context");
      out += *passage;
      i += kPassage.size();
    } else {
      out += tmpl[i++];
    }
  }
  return out;
}

std::string render_prompt(const Instance& instance, const TemplateOverrides& overrides) {
  std::string_view tmpl = builtin_template(instance.dataset_kind);
  if (auto it = overrides.find(instance.dataset_kind); it != overrides.end()) tmpl = it->second;
  if (tmpl.empty()) {
    throw Error(ErrorCode::kInvalidArgument,
                fmt::format("no prompt template registered for dataset_kind {}",
                            to_string(instance.dataset_kind)));
  }
  try {
    return render_template(tmpl, instance.input, instance.context);
  } catch (const Error& e) {
    throw Error(e.code(), fmt::format("({}, {}): {}", instance.group_id, instance.variant_id, e.what()));
  }
}

void ModelConfig::validate() const {
  if (endpoint_url.empty()) throw Error(ErrorCode::kInvalidArgument, "model.endpoint_url is required");
  if (model_name.empty()) throw Error(ErrorCode::kInvalidArgument, "model.model_name is required");
  if (temperature != 0.0) {
    throw Error(ErrorCode::kInvalidArgument, "evaluation runs use greedy decoding; temperature must be 0");
  }
  if (max_new_tokens < 1) throw Error(ErrorCode::kInvalidArgument, "model.max_new_tokens must be positive");
  if (max_parallel_requests < 1) {
    throw Error(ErrorCode::kInvalidArgument, "model.max_parallel_requests must be positive");
  }
  if (retry.max_retries < 0) throw Error(ErrorCode::kInvalidArgument, "model.max_retries must be >= 0");
  if (system_prompt && api_style != ApiStyle::kChat) {
    throw Error(ErrorCode::kInvalidArgument, "model.system_prompt requires api_style \"chat\"");
  }
}

ModelConfig ModelConfig::from_json(const Json& value) {
  ModelConfig c;
  c.endpoint_url = value.value("endpoint_url", std::string{});
  c.model_name = value.value("model_name", std::string{});
  c.temperature = value.value("temperature", 0.0);
  c.max_new_tokens = value.value("max_new_tokens", 64);
  c.auth_token_env = value.value("auth_token_env", std::string{});
  c.max_parallel_requests = value.value("max_parallel_requests", std::size_t{4});
  c.retry.max_retries = value.value("max_retries", 3);
  c.retry.backoff = std::chrono::milliseconds(value.value("backoff_ms", 500));
  c.retry.backoff_factor = value.value("backoff_factor", 2.0);
  c.timeout = std::chrono::seconds(value.value("timeout_s", 60));
  const std::string style = value.value("api_style", std::string{"completion"});
  if (style == "chat") {
    c.api_style = ApiStyle::kChat;
  } else if (style != "completion") {
    throw Error(ErrorCode::kInvalidArgument, fmt::format("unknown api_style '{}'", style));
  }
  if (auto it = value.find("system_prompt"); it != value.end() && it->is_string()) {
    c.system_prompt = it->get<std::string>();
  }
  return c;
}

Json build_request_body(const ModelConfig& config, const std::string& prompt) {
  Json body{{"model", config.model_name},
            {"temperature", config.temperature},
            {"top_p", 1.0},
            {"max_tokens", config.max_new_tokens}};
  if (config.api_style == ApiStyle::kChat) {
    Json messages = Json::array();
    if (config.system_prompt) messages.push_back({{"role", "system"}, {"content", *config.system_prompt}});
    messages.push_back({{"role", "user"}, {"content", prompt}});
    body["messages"] = std::move(messages);
  } else {
    body["prompt"] = prompt;
  }
  return body;
}

std::string extract_completion(const Json& body) {
  if (body.is_object()) {
    if (auto choices = body.find("choices"); choices != body.end() && choices->is_array() &&
                                             !choices->empty()) {
      const Json& first = choices->front();
      if (first.contains("text") && first["text"].is_string()) return first["text"].get<std::string>();
      if (first.contains("message") && first["message"].is_object()) {
        const Json& content = first["message"].value("content", Json());
        if (content.is_string()) return content.get<std::string>();
      }
    }
    for (const char* key : {"completion", "text", "generated_text", "response"}) {
      if (auto it = body.find(key); it != body.end() && it->is_string()) return it->get<std::string>();
    }
  }
  if (body.is_array() && !body.empty() && body.front().is_object() &&
      body.front().contains("generated_text")) {
    return body.front()["generated_text"].get<std::string>();
  }
  throw Error(ErrorCode::kNetwork, "malformed response body: no completion field");
}

HttpGenerator::HttpGenerator(ModelConfig config) : config_(std::move(config)) {
  config_.validate();
  static const std::regex kUrl(R"(^(https?://[^/]+)(/.*)?$)");
  std::smatch m;
  if (!std::regex_match(config_.endpoint_url, m, kUrl)) {
    throw Error(ErrorCode::kInvalidArgument, fmt::format("invalid endpoint_url '{}'", config_.endpoint_url));
  }
  scheme_host_port_ = m[1].str();
  path_ = m[2].matched ? m[2].str() : "/";
  if (!config_.auth_token_env.empty()) {
    const char* token = std::getenv(config_.auth_token_env.c_str());
    if (token == nullptr || *token == '\0') {
      throw Error(ErrorCode::kInvalidArgument,
                  fmt::format("auth token environment variable {} is not set", config_.auth_token_env));
    }
    token_ = token;
  }
}

HttpGenerator::~HttpGenerator() = default;

GenerateResult HttpGenerator::generate(const std::string& prompt) {
  const std::string body = dump_compact(build_request_body(config_, prompt));
  httplib::Headers headers;
  if (!token_.empty()) headers.emplace("Authorization", "Bearer " + token_);

  GenerateResult result;
  std::string last_error;
  auto delay = config_.retry.backoff;
  for (int attempt = 0; attempt <= config_.retry.max_retries; ++attempt) {
    if (attempt > 0) {
      ++result.retries;
      std::this_thread::sleep_for(delay);
      delay = std::chrono::milliseconds(
          static_cast<long>(std::llround(static_cast<double>(delay.count()) * config_.retry.backoff_factor)));
    }
    httplib::Client client(scheme_host_port_);
    client.set_connection_timeout(config_.timeout);
    client.set_read_timeout(config_.timeout);
    client.set_write_timeout(config_.timeout);
    auto response = client.Post(path_, headers, body, "application/json");
    if (!response) {
      last_error = fmt::format("request failed: {}", httplib::to_string(response.error()));
      continue;
    }
    if (response->status >= 200 && response->status < 300) {
      Json parsed;
      try {
        parsed = Json::parse(response->body);
      } catch (const Json::parse_error&) {
        throw Error(ErrorCode::kNetwork, "malformed response body: not JSON");
      }
      result.completion = extract_completion(parsed);
      return result;
    }
    last_error = fmt::format("HTTP {}", response->status);
    if (!is_transient(response->status)) break;
  }
  throw Error(ErrorCode::kNetwork,
              fmt::format("{} after {} retries ({})", last_error, result.retries, config_.endpoint_url));
}

GenerateResult generate(const std::string& prompt, const ModelConfig& config) {
  HttpGenerator generator(config);
  return generator.generate(prompt);
}

std::string cache_key(std::string_view model_name, std::string_view prompt) {
  std::string material(model_name);
  material += '\x1f';
  material += prompt;
  return sha256_hex(material);
}

CompletionCache::CompletionCache(std::filesystem::path path) : path_(std::move(path)) {
  if (!std::filesystem::exists(path_)) return;
  for (const auto& record : read_jsonl(path_, /*tolerate_truncated_tail=*/true).records) {
    const Json& v = record.value;
    if (v.contains("key") && v["key"].is_string() && v.contains("completion") &&
        v["completion"].is_string()) {
      entries_.emplace(v["key"].get<std::string>(), v["completion"].get<std::string>());
    }
  }
  // A final line without its newline is either complete (terminate it) or
  // torn by a crash (drop it), so the next append starts on a fresh line.
  std::ifstream in(path_, std::ios::binary);
  const std::string content{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
  in.close();
  if (content.empty() || content.back() == '\n') return;
  const std::size_t tail_start = content.rfind('\n') == std::string::npos ? 0 : content.rfind('\n') + 1;
  if (Json::accept(content.substr(tail_start))) {
    std::ofstream(path_, std::ios::binary | std::ios::app) << '\n';
  } else {
    std::filesystem::resize_file(path_, tail_start);
  }
}

std::optional<std::string> CompletionCache::lookup(const std::string& key) const {
  std::lock_guard lock(mutex_);
  auto it = entries_.find(key);
  if (it == entries_.end()) return std::nullopt;
  return it->second;
}

void CompletionCache::append(const std::string& key, const std::string& prompt,
                             const std::string& completion) {
  const std::string line =
      dump_compact(Json{{"key", key}, {"prompt", prompt}, {"completion", completion}}) + "\n";
  std::lock_guard lock(mutex_);
  if (entries_.count(key)) return;
  std::ofstream out(path_, std::ios::binary | std::ios::app);
  if (!out || !out.write(line.data(), static_cast<std::streamsize>(line.size())).flush()) {
    throw Error(ErrorCode::kIo, fmt::format("cannot append to cache {}", path_.string()));
  }
  entries_.emplace(key, completion);
}

std::size_t CompletionCache::size() const {
  std::lock_guard lock(mutex_);
  return entries_.size();
}

InferenceRun run_inference(const Dataset& dataset, const ModelConfig& config,
                           const std::filesystem::path& cache_path, TextGenerator& generator,
                           const TemplateOverrides& overrides) {
  config.validate();
  CompletionCache cache(cache_path);

  struct Item {
    const Instance* instance;
    std::string prompt;
    std::string key;
    std::string render_error;
  };
  std::vector<Item> items;
  items.reserve(dataset.instance_count());
  auto add = [&](const Instance& instance) {
    Item item{&instance, {}, {}, {}};
    try {
      item.prompt = render_prompt(instance, overrides);
      item.key = cache_key(config.model_name, item.prompt);
    } catch (const Error& e) {
      item.render_error = e.what();
    }
    items.push_back(std::move(item));
  };
  for (const auto& g : dataset.groups) {
    add(g.original);
    for (const auto& v : g.variants) add(v);
  }

  InferenceRun run;
  std::vector<const Item*> pending;
  std::set<std::string> queued;
  for (const auto& item : items) {
    if (!item.render_error.empty()) continue;
    if (cache.lookup(item.key)) {
      ++run.cache_hits;
    } else if (queued.insert(item.key).second) {
      pending.push_back(&item);
    }
  }

  std::mutex errors_mutex;
  std::map<std::string, std::string> request_errors;
  std::atomic<std::size_t> next{0};
  std::atomic<std::size_t> retries{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < pending.size(); i = next++) {
      const Item& item = *pending[i];
      try {
        GenerateResult r = generator.generate(item.prompt);
        retries += static_cast<std::size_t>(r.retries);
        cache.append(item.key, item.prompt, r.completion);
      } catch (const std::exception& e) {
        std::lock_guard lock(errors_mutex);
        request_errors[item.key] = e.what();
      }
    }
  };
  const std::size_t n_threads = std::min(config.max_parallel_requests, pending.size());
  {
    std::vector<std::jthread> threads;
    for (std::size_t t = 0; t < n_threads; ++t) threads.emplace_back(worker);
  }
  run.requests_issued = pending.size();
  run.retries = retries;

  for (const auto& item : items) {
    const Instance& instance = *item.instance;
    std::optional<std::string> completion;
    std::string error = item.render_error;
    if (error.empty()) {
      completion = cache.lookup(item.key);
      if (!completion) {
        auto it = request_errors.find(item.key);
        error = it != request_errors.end() ? it->second : "no completion";
      }
    }
    if (completion) {
      run.predictions.push_back({instance.group_id, instance.variant_id, config.model_name, *completion});
    } else {
      run.failures.push_back({instance.group_id, instance.variant_id, error});
      run.incomplete_groups.insert(instance.group_id);
    }
  }
  return run;
}

void write_predictions(const std::vector<Prediction>& predictions, const std::filesystem::path& path,
                       const std::optional<FileMeta>& meta) {
  std::vector<Json> records;
  records.reserve(predictions.size());
  for (const auto& p : predictions) records.push_back(to_json(p));
  write_jsonl(path, meta ? std::optional<Json>(meta->to_json()) : std::nullopt, records);
}

std::string paraphrase_prompt(std::string_view input, std::size_t k) {
  return fmt::format(
      "Rewrite the following text in {} different ways without changing its meaning. Write one "
      "paraphrase per line and nothing else.\nText: {}\nParaphrases:",
      k, input);
}

std::vector<std::string> paraphrase_provider(const std::string& input, TextGenerator& generator,
                                             std::size_t k) {
  if (k < 1 || k > 5) throw Error(ErrorCode::kInvalidArgument, "paraphrase count must be in [1, 5]");
  const std::string completion = generator.generate(paraphrase_prompt(input, k)).completion;

  static const std::regex kListMarker(R"(^\s*(?:[-*]|\d+[.)])\s*)");
  std::set<std::string> seen{text::fold(input)};
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= completion.size() && out.size() < k) {
    std::size_t end = completion.find('\n', start);
    if (end == std::string::npos) end = completion.size();
    std::string line = text::trim(std::regex_replace(completion.substr(start, end - start), kListMarker, ""));
    start = end + 1;
    if (line.empty()) continue;
    if (seen.insert(text::fold(line)).second) out.push_back(std::move(line));
  }
  return out;
}

}  // namespace robeval
