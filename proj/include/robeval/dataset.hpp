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

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "robeval/jsonl.hpp"

namespace robeval {

enum class VariantType { kOriginal, kSuperficial, kParaphrase, kDistraction };
enum class DatasetKind { kPopQA, kBoolQ, kSIGA, kCustom };

std::string_view to_string(VariantType t);
std::string_view to_string(DatasetKind k);
VariantType parse_variant_type(std::string_view s);
DatasetKind parse_dataset_kind(std::string_view s);

inline constexpr std::string_view kOriginalVariantId = "o";

struct Instance {
  std::string group_id;
  std::string variant_id;
  VariantType variant_type = VariantType::kOriginal;
  std::string input;
  std::optional<std::string> context;
  std::vector<std::string> references;
  DatasetKind dataset_kind = DatasetKind::kCustom;
  std::vector<std::string> perturbation_ops;

  bool operator==(const Instance&) const = default;
};

// Throws kData if the instance breaks one of its own invariants.
void validate(const Instance& instance);

Json to_json(const Instance& instance);
Instance instance_from_json(const Json& value);

struct PerturbationGroup {
  std::string group_id;
  Instance original;
  std::vector<Instance> variants;

  std::size_t size() const { return variants.size(); }
  bool has_variant(std::string_view variant_id) const;
  // Smallest "<prefix>N" (N >= 1) not already used as a variant id.
  std::string next_variant_id(std::string_view prefix) const;

  bool operator==(const PerturbationGroup&) const = default;
};

struct Dataset {
  std::string name;
  std::vector<PerturbationGroup> groups;

  std::size_t instance_count() const;
  const PerturbationGroup* find(std::string_view group_id) const;

  bool operator==(const Dataset&) const = default;
};

struct LoadOptions {
  // Raw datasets handed to the perturbation stage contain originals only.
  bool allow_unperturbed_groups = false;
};

Dataset load_dataset(const std::filesystem::path& path, const LoadOptions& options = {});

// Parses already-split records; `source` is used in error messages.
Dataset dataset_from_records(const std::vector<JsonlRecord>& records, std::string name,
                             const LoadOptions& options = {}, std::string_view source = "");

// The leading meta record always carries the dataset name so that a
// load/write round trip is exact.
void write_dataset(const Dataset& dataset, const std::filesystem::path& path,
                   const std::optional<FileMeta>& meta = std::nullopt);

}  // namespace robeval
