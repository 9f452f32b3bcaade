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
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "robeval/dataset.hpp"

namespace robeval {

enum class SuperficialKind {
  kUpperCaseAll,
  kLowerCaseAll,
  kProperCase,
  kFirstLetterCaseFlip,
  kRemoveTerminalPunctuation,
  kButterfingerTypo,
  kCharacterSwap,
  kRedundantWhitespace,
};

std::span<const SuperficialKind> all_superficial_kinds();
std::string_view to_string(SuperficialKind kind);
SuperficialKind parse_superficial_kind(std::string_view name);

// Kinds are applied in list order; each kind draws from its own stream
// derived from `seed`, so inserting a kind does not reshuffle the others.
struct PerturbRecipe {
  std::vector<SuperficialKind> kinds;
  std::uint64_t seed = 0;
};

std::string apply_superficial(std::string_view text, const PerturbRecipe& recipe);

// QWERTY neighbours: same-row horizontal keys plus the touching keys on the
// rows above and below. Keys are lower-case ASCII letters.
const std::map<char, std::string>& keyboard_adjacency();
inline constexpr std::string_view kKeyboardAdjacencyVersion = "qwerty-v1";

// Redundant whitespace widens this many single spaces into runs of
// kWideSpaceWidth spaces (fewer when the text has fewer spaces).
inline constexpr std::size_t kWidenedSpaces = 2;
inline constexpr std::size_t kWideSpaceWidth = 5;

enum class Placement { kBefore, kAfter, kRandom };
std::string_view to_string(Placement placement);
Placement parse_placement(std::string_view name);

struct DistractionSpec {
  Placement placement = Placement::kAfter;
  std::uint64_t seed = 0;
};

inline constexpr std::string_view kPassageSeparator = "\n\n";

// Picks a passage uniformly among corpus entries that differ from the
// group's own passage and joins it to the original context.
Instance add_distraction(const PerturbationGroup& group, std::span<const std::string> corpus,
                         const DistractionSpec& spec);

inline constexpr std::size_t kMaxParaphrases = 5;

// Appends up to kMaxParaphrases paraphrase variants, in candidate order,
// skipping candidates that fold to the original or to an earlier candidate.
PerturbationGroup attach_paraphrases(const PerturbationGroup& group,
                                     std::span<const std::string> candidates,
                                     std::size_t limit = kMaxParaphrases);

// Sidecar JSONL: {"group_id": ..., "paraphrases": [...]} per line.
std::map<std::string, std::vector<std::string>> load_paraphrase_sidecar(
    const std::filesystem::path& path);

// Returns paraphrase candidates for an original instance; throws on failure.
using ParaphraseProvider = std::function<std::vector<std::string>(const Instance& original)>;

struct ExpansionConfig {
  std::size_t superficial_count = 0;
  std::vector<SuperficialKind> superficial_kinds;  // empty: all kinds

  std::optional<std::filesystem::path> paraphrase_file;
  bool paraphrase_from_provider = false;
  std::size_t paraphrase_limit = kMaxParaphrases;

  std::optional<Placement> distraction;
  std::optional<std::filesystem::path> distraction_corpus;  // default: dataset contexts

  std::uint64_t seed = 0;

  // {superficial: {count, kinds?}, paraphrase: {source, count?},
  //  distraction: {placement, corpus?}, seed}. Relative paths resolve
  // against `base_dir`.
  static ExpansionConfig from_json(const Json& value, const std::filesystem::path& base_dir = {});
};

struct GroupFailure {
  std::string group_id;
  std::string variant_id;  // empty when the whole group failed
  std::string error;
};

struct ExpansionResult {
  Dataset dataset;
  std::map<VariantType, std::size_t> added;
  std::vector<std::string> warnings;
  std::vector<GroupFailure> failures;
};

ExpansionResult expand_dataset(const Dataset& dataset, const ExpansionConfig& config,
                               const ParaphraseProvider& provider = {});

}  // namespace robeval
