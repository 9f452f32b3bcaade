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

#include "robeval/dataset.hpp"

#include <algorithm>
#include <array>
#include <set>
#include <unordered_map>

#include <fmt/format.h>

#include "robeval/error.hpp"

namespace robeval {
namespace {

constexpr std::array<std::pair<VariantType, std::string_view>, 4> kVariantTypeNames{{
    {VariantType::kOriginal, "original"},
    {VariantType::kSuperficial, "superficial"},
    {VariantType::kParaphrase, "paraphrase"},
    {VariantType::kDistraction, "distraction"},
}};

constexpr std::array<std::pair<DatasetKind, std::string_view>, 4> kDatasetKindNames{{
    {DatasetKind::kPopQA, "popqa"},
    {DatasetKind::kBoolQ, "boolq"},
    {DatasetKind::kSIGA, "siga"},
    {DatasetKind::kCustom, "custom"},
}};

std::string where(const Instance& instance) {
  return fmt::format("({}, {})", instance.group_id, instance.variant_id);
}

const Json& require(const Json& obj, const char* key) {
  auto it = obj.find(key);
  if (it == obj.end()) throw Error(ErrorCode::kData, fmt::format("missing field '{}'", key));
  return *it;
}

std::string require_string(const Json& obj, const char* key) {
  const Json& v = require(obj, key);
  if (!v.is_string()) throw Error(ErrorCode::kData, fmt::format("field '{}' must be a string", key));
  return v.get<std::string>();
}

std::vector<std::string> require_string_list(const Json& obj, const char* key) {
  const Json& v = require(obj, key);
  if (!v.is_array()) throw Error(ErrorCode::kData, fmt::format("field '{}' must be a list", key));
  std::vector<std::string> out;
  for (const auto& e : v) {
    if (!e.is_string()) {
      throw Error(ErrorCode::kData, fmt::format("field '{}' must contain strings", key));
    }
    out.push_back(e.get<std::string>());
  }
  return out;
}

}  // namespace

std::string_view to_string(VariantType t) {
  for (const auto& [v, name] : kVariantTypeNames)
    if (v == t) return name;
  return "original";
}

std::string_view to_string(DatasetKind k) {
  for (const auto& [v, name] : kDatasetKindNames)
    if (v == k) return name;
  return "custom";
}

VariantType parse_variant_type(std::string_view s) {
  for (const auto& [v, name] : kVariantTypeNames)
    if (name == s) return v;
  throw Error(ErrorCode::kData, fmt::format("unknown variant_type '{}'", s));
}

DatasetKind parse_dataset_kind(std::string_view s) {
  for (const auto& [v, name] : kDatasetKindNames)
    if (name == s) return v;
  throw Error(ErrorCode::kData, fmt::format("unknown dataset_kind '{}'", s));
}

void validate(const Instance& instance) {
  if (instance.group_id.empty()) throw Error(ErrorCode::kData, "empty group_id");
  if (instance.variant_id.empty()) {
    throw Error(ErrorCode::kData, fmt::format("empty variant_id in group {}", instance.group_id));
  }
  const bool type_original = instance.variant_type == VariantType::kOriginal;
  const bool id_original = instance.variant_id == kOriginalVariantId;
  const bool no_ops = instance.perturbation_ops.empty();
  if (type_original != id_original || type_original != no_ops) {
    throw Error(ErrorCode::kData,
                fmt::format("{}: variant_type original, variant_id \"o\" and empty "
                            "perturbation_ops must coincide",
                            where(instance)));
  }
  if (instance.references.empty()) {
    throw Error(ErrorCode::kData, fmt::format("{}: references is empty", where(instance)));
  }
  for (const auto& r : instance.references) {
    if (r.empty()) throw Error(ErrorCode::kData, fmt::format("{}: empty reference", where(instance)));
  }
  switch (instance.dataset_kind) {
    case DatasetKind::kBoolQ:
      if (!instance.context) {
        throw Error(ErrorCode::kData, fmt::format("{}: boolq instance needs a context", where(instance)));
      }
      break;
    case DatasetKind::kPopQA:
    case DatasetKind::kSIGA:
      if (instance.context) {
        throw Error(ErrorCode::kData, fmt::format("{}: {} instances carry no context",
                                                  where(instance), to_string(instance.dataset_kind)));
      }
      break;
    case DatasetKind::kCustom:
      break;
  }
}

Json to_json(const Instance& instance) {
  Json j = Json::object();
  j["group_id"] = instance.group_id;
  j["variant_id"] = instance.variant_id;
  j["variant_type"] = to_string(instance.variant_type);
  j["input"] = instance.input;
  j["context"] = instance.context ? Json(*instance.context) : Json(nullptr);
  j["references"] = instance.references;
  j["dataset_kind"] = to_string(instance.dataset_kind);
  j["perturbation_ops"] = instance.perturbation_ops;
  return j;
}

Instance instance_from_json(const Json& value) {
  Instance instance;
  instance.group_id = require_string(value, "group_id");
  instance.variant_id = require_string(value, "variant_id");
  instance.variant_type = parse_variant_type(require_string(value, "variant_type"));
  instance.input = require_string(value, "input");
  if (auto it = value.find("context"); it != value.end() && !it->is_null()) {
    if (!it->is_string()) throw Error(ErrorCode::kData, "field 'context' must be a string or null");
    instance.context = it->get<std::string>();
  }
  instance.references = require_string_list(value, "references");
  instance.dataset_kind = parse_dataset_kind(require_string(value, "dataset_kind"));
  if (value.contains("perturbation_ops")) {
    instance.perturbation_ops = require_string_list(value, "perturbation_ops");
  }
  validate(instance);
  return instance;
}

bool PerturbationGroup::has_variant(std::string_view variant_id) const {
  return std::any_of(variants.begin(), variants.end(),
                     [&](const Instance& v) { return v.variant_id == variant_id; });
}

std::string PerturbationGroup::next_variant_id(std::string_view prefix) const {
  for (std::size_t n = 1;; ++n) {
    std::string id = fmt::format("{}{}", prefix, n);
    if (!has_variant(id)) return id;
  }
}

std::size_t Dataset::instance_count() const {
  std::size_t n = 0;
  for (const auto& g : groups) n += 1 + g.variants.size();
  return n;
}

const PerturbationGroup* Dataset::find(std::string_view group_id) const {
  for (const auto& g : groups)
    if (g.group_id == group_id) return &g;
  return nullptr;
}

Dataset dataset_from_records(const std::vector<JsonlRecord>& records, std::string name,
                             const LoadOptions& options, std::string_view source) {
  if (records.empty()) {
    throw Error(ErrorCode::kData, fmt::format("{}: dataset is empty", source));
  }

  struct Pending {
    std::optional<Instance> original;
    std::vector<Instance> variants;
    std::set<std::string, std::less<>> ids;
  };
  std::vector<std::string> order;
  std::unordered_map<std::string, Pending> pending;

  for (const auto& record : records) {
    Instance instance;
    try {
      instance = instance_from_json(record.value);
    } catch (const Error& e) {
      throw Error(e.code(), fmt::format("{}:{}: {}", source, record.line_no, e.what()));
    }
    auto [it, inserted] = pending.try_emplace(instance.group_id);
    if (inserted) order.push_back(instance.group_id);
    Pending& p = it->second;
    if (!p.ids.insert(instance.variant_id).second) {
      throw Error(ErrorCode::kData, fmt::format("{}:{}: duplicate (group_id, variant_id) ({}, {})",
                                                source, record.line_no, instance.group_id,
                                                instance.variant_id));
    }
    if (instance.variant_type == VariantType::kOriginal) {
      p.original = std::move(instance);
    } else {
      p.variants.push_back(std::move(instance));
    }
  }

  Dataset dataset;
  dataset.name = std::move(name);
  dataset.groups.reserve(order.size());
  for (const auto& id : order) {
    Pending& p = pending[id];
    if (!p.original) {
      throw Error(ErrorCode::kData, fmt::format("{}: group missing original: {}", source, id));
    }
    if (p.variants.empty() && !options.allow_unperturbed_groups) {
      throw Error(ErrorCode::kData, fmt::format("{}: group {} has no perturbed variants", source, id));
    }
    for (const auto& v : p.variants) {
      if (v.dataset_kind != p.original->dataset_kind) {
        throw Error(ErrorCode::kData, fmt::format("{}: ({}, {}) dataset_kind differs from its original",
                                                  source, id, v.variant_id));
      }
    }
    dataset.groups.push_back({id, std::move(*p.original), std::move(p.variants)});
  }
  return dataset;
}

Dataset load_dataset(const std::filesystem::path& path, const LoadOptions& options) {
  JsonlFile file = read_jsonl(path);
  std::string name = path.stem().string();
  if (file.meta && file.meta->contains("dataset") && (*file.meta)["dataset"].is_string()) {
    name = (*file.meta)["dataset"].get<std::string>();
  }
  return dataset_from_records(file.records, std::move(name), options, path.string());
}

void write_dataset(const Dataset& dataset, const std::filesystem::path& path,
                   const std::optional<FileMeta>& meta) {
  Json meta_json = meta ? meta->to_json() : Json::object();
  meta_json["dataset"] = dataset.name;

  std::vector<Json> records;
  records.reserve(dataset.instance_count());
  for (const auto& g : dataset.groups) {
    records.push_back(to_json(g.original));
    for (const auto& v : g.variants) records.push_back(to_json(v));
  }
  write_jsonl(path, meta_json, records);
}

}  // namespace robeval
