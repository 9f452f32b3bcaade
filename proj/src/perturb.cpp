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

#include "robeval/perturb.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <set>

#include <fmt/format.h>

#include "robeval/error.hpp"
#include "robeval/seed.hpp"
#include "robeval/text.hpp"

namespace robeval {
namespace {

constexpr std::array<std::pair<SuperficialKind, std::string_view>, 8> kKindNames{{
    {SuperficialKind::kUpperCaseAll, "upper_case_all"},
    {SuperficialKind::kLowerCaseAll, "lower_case_all"},
    {SuperficialKind::kProperCase, "proper_case"},
    {SuperficialKind::kFirstLetterCaseFlip, "first_letter_case_flip"},
    {SuperficialKind::kRemoveTerminalPunctuation, "remove_terminal_punctuation"},
    {SuperficialKind::kButterfingerTypo, "butterfinger_typo"},
    {SuperficialKind::kCharacterSwap, "character_swap"},
    {SuperficialKind::kRedundantWhitespace, "redundant_whitespace"},
}};

constexpr std::array<SuperficialKind, 8> kAllKinds{
    SuperficialKind::kUpperCaseAll,         SuperficialKind::kLowerCaseAll,
    SuperficialKind::kProperCase,           SuperficialKind::kFirstLetterCaseFlip,
    SuperficialKind::kRemoveTerminalPunctuation, SuperficialKind::kButterfingerTypo,
    SuperficialKind::kCharacterSwap,        SuperficialKind::kRedundantWhitespace,
};

// Superficial variants compose at most this many kinds.
constexpr std::size_t kMaxKindsPerVariant = 3;
// Draws per variant before accepting a vacuous or duplicate edit.
constexpr int kMaxVariantAttempts = 32;

std::map<char, std::string> build_qwerty_adjacency() {
  const std::array<std::string_view, 3> rows{"qwertyuiop", "asdfghjkl", "zxcvbnm"};
  auto at = [&](std::size_t row, long col) -> std::optional<char> {
    if (col < 0 || static_cast<std::size_t>(col) >= rows[row].size()) return std::nullopt;
    return rows[row][static_cast<std::size_t>(col)];
  };
  std::map<char, std::string> adjacency;
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (std::size_t c = 0; c < rows[r].size(); ++c) {
      const long col = static_cast<long>(c);
      std::string neighbours;
      auto add = [&](std::optional<char> k) {
        if (k) neighbours.push_back(*k);
      };
      add(at(r, col - 1));
      add(at(r, col + 1));
      // Each row sits half a key to the right of the one above it.
      if (r > 0) {
        add(at(r - 1, col));
        add(at(r - 1, col + 1));
      }
      if (r + 1 < rows.size()) {
        add(at(r + 1, col - 1));
        add(at(r + 1, col));
      }
      adjacency[rows[r][c]] = neighbours;
    }
  }
  return adjacency;
}

bool is_terminal_punct(char32_t c) { return c == U'.' || c == U'?' || c == U'!'; }

void flip_case(char32_t& c) {
  if (text::is_upper(c)) {
    c = text::to_lower(c);
  } else if (text::is_lower(c)) {
    c = text::to_upper(c);
  }
}

void proper_case(std::u32string& s) {
  bool seen_letter = false;
  for (auto& c : s) {
    if (text::is_space(c)) {
      seen_letter = false;
    } else if (text::is_alpha(c)) {
      c = seen_letter ? text::to_lower(c) : text::to_upper(c);
      seen_letter = true;
    }
  }
}

void first_letter_case_flip(std::u32string& s) {
  for (auto& c : s) {
    if (text::is_upper(c) || text::is_lower(c)) {
      flip_case(c);
      return;
    }
  }
}

void butterfinger(std::u32string& s, Rng& rng) {
  const auto& adjacency = keyboard_adjacency();
  std::vector<std::size_t> eligible;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] < 0x80 && adjacency.count(static_cast<char>(std::tolower(static_cast<int>(s[i]))))) {
      eligible.push_back(i);
    }
  }
  if (eligible.empty()) return;
  const std::size_t pos = eligible[uniform_index(rng, eligible.size())];
  const char original = static_cast<char>(s[pos]);
  const bool was_upper = std::isupper(static_cast<unsigned char>(original)) != 0;
  const std::string& neighbours =
      adjacency.at(static_cast<char>(std::tolower(static_cast<unsigned char>(original))));
  char replacement = neighbours[uniform_index(rng, neighbours.size())];
  if (was_upper) replacement = static_cast<char>(std::toupper(static_cast<unsigned char>(replacement)));
  s[pos] = static_cast<char32_t>(replacement);
}

void character_swap(std::u32string& s, Rng& rng) {
  std::vector<std::size_t> eligible;
  for (std::size_t i = 0; i + 1 < s.size(); ++i) {
    if (!text::is_space(s[i]) && !text::is_space(s[i + 1]) && s[i] != s[i + 1]) {
      eligible.push_back(i);
    }
  }
  if (eligible.empty()) return;
  const std::size_t pos = eligible[uniform_index(rng, eligible.size())];
  std::swap(s[pos], s[pos + 1]);
}

void redundant_whitespace(std::u32string& s, Rng& rng) {
  std::vector<std::size_t> singles;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] != U' ') continue;
    const bool left_space = i > 0 && text::is_space(s[i - 1]);
    const bool right_space = i + 1 < s.size() && text::is_space(s[i + 1]);
    if (!left_space && !right_space) singles.push_back(i);
  }
  const std::size_t take = std::min(kWidenedSpaces, singles.size());
  for (std::size_t k = 0; k < take; ++k) {
    std::swap(singles[k], singles[k + uniform_index(rng, singles.size() - k)]);
  }
  std::vector<std::size_t> chosen(singles.begin(), singles.begin() + static_cast<long>(take));
  std::sort(chosen.rbegin(), chosen.rend());
  for (std::size_t pos : chosen) s.insert(pos, kWideSpaceWidth - 1, U' ');
}

void apply_kind(std::u32string& s, SuperficialKind kind, Rng& rng) {
  switch (kind) {
    case SuperficialKind::kUpperCaseAll:
      for (auto& c : s) c = text::to_upper(c);
      break;
    case SuperficialKind::kLowerCaseAll:
      for (auto& c : s) c = text::to_lower(c);
      break;
    case SuperficialKind::kProperCase:
      proper_case(s);
      break;
    case SuperficialKind::kFirstLetterCaseFlip:
      first_letter_case_flip(s);
      break;
    case SuperficialKind::kRemoveTerminalPunctuation:
      while (!s.empty() && is_terminal_punct(s.back())) s.pop_back();
      break;
    case SuperficialKind::kButterfingerTypo:
      butterfinger(s, rng);
      break;
    case SuperficialKind::kCharacterSwap:
      character_swap(s, rng);
      break;
    case SuperficialKind::kRedundantWhitespace:
      redundant_whitespace(s, rng);
      break;
  }
}

std::vector<std::string> load_corpus(const std::filesystem::path& path) {
  std::vector<std::string> corpus;
  for (const auto& record : read_jsonl(path).records) {
    auto it = record.value.find("passage");
    if (it == record.value.end() || !it->is_string()) {
      throw Error(ErrorCode::kData,
                  fmt::format("{}:{}: expected {{\"passage\": string}}", path.string(), record.line_no));
    }
    corpus.push_back(it->get<std::string>());
  }
  return corpus;
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
  std::filesystem::path path(p);
  return path.is_absolute() || base.empty() ? path : base / path;
}

}  // namespace

std::span<const SuperficialKind> all_superficial_kinds() { return kAllKinds; }

std::string_view to_string(SuperficialKind kind) {
  for (const auto& [k, name] : kKindNames)
    if (k == kind) return name;
  return "";
}

SuperficialKind parse_superficial_kind(std::string_view name) {
  for (const auto& [k, n] : kKindNames)
    if (n == name) return k;
  throw Error(ErrorCode::kInvalidArgument, fmt::format("unknown superficial kind '{}'", name));
}

const std::map<char, std::string>& keyboard_adjacency() {
  static const std::map<char, std::string> adjacency = build_qwerty_adjacency();
  return adjacency;
}

std::string apply_superficial(std::string_view input, const PerturbRecipe& recipe) {
  if (text::trim(input).empty()) {
    throw Error(ErrorCode::kInvalidArgument, "cannot perturb empty text");
  }
  if (recipe.kinds.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "perturbation recipe has no kinds");
  }
  std::set<SuperficialKind> seen;
  for (auto k : recipe.kinds) {
    if (!seen.insert(k).second) {
      throw Error(ErrorCode::kInvalidArgument,
                  fmt::format("perturbation recipe repeats kind {}", to_string(k)));
    }
  }

  std::u32string s = text::to_utf32(input);
  for (auto kind : recipe.kinds) {
    Rng rng(derive_seed(recipe.seed, to_string(kind)));
    apply_kind(s, kind, rng);
  }
  return text::to_utf8(s);
}

std::string_view to_string(Placement placement) {
  switch (placement) {
    case Placement::kBefore:
      return "before";
    case Placement::kAfter:
      return "after";
    case Placement::kRandom:
      return "random";
  }
  return "after";
}

Placement parse_placement(std::string_view name) {
  if (name == "before") return Placement::kBefore;
  if (name == "after") return Placement::kAfter;
  if (name == "random") return Placement::kRandom;
  throw Error(ErrorCode::kInvalidArgument, fmt::format("unknown distraction placement '{}'", name));
}

Instance add_distraction(const PerturbationGroup& group, std::span<const std::string> corpus,
                         const DistractionSpec& spec) {
  const Instance& original = group.original;
  if (!original.context) {
    throw Error(ErrorCode::kInvalidArgument,
                fmt::format("distraction requires a context passage; group {} has none", group.group_id));
  }
  if (corpus.size() < 2) {
    throw Error(ErrorCode::kInvalidArgument, "distraction corpus needs at least 2 passages");
  }
  std::vector<std::size_t> candidates;
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    if (corpus[i] != *original.context) candidates.push_back(i);
  }
  if (candidates.empty()) {
    throw Error(ErrorCode::kInvalidArgument,
                fmt::format("distraction corpus has no passage other than group {}'s own", group.group_id));
  }

  Rng rng(spec.seed);
  Placement placement = spec.placement;
  if (placement == Placement::kRandom) {
    placement = uniform_index(rng, 2) == 0 ? Placement::kBefore : Placement::kAfter;
  }
  const std::string& distractor = corpus[candidates[uniform_index(rng, candidates.size())]];

  Instance variant = original;
  variant.variant_id = group.next_variant_id("d");
  variant.variant_type = VariantType::kDistraction;
  const std::string sep(kPassageSeparator);
  if (placement == Placement::kBefore) {
    variant.context = distractor + sep + *original.context;
    variant.perturbation_ops = {"distraction_before"};
  } else {
    variant.context = *original.context + sep + distractor;
    variant.perturbation_ops = {"distraction_after"};
  }
  return variant;
}

PerturbationGroup attach_paraphrases(const PerturbationGroup& group,
                                     std::span<const std::string> candidates, std::size_t limit) {
  PerturbationGroup out = group;
  std::set<std::string> seen{text::fold(group.original.input)};
  for (const auto& v : group.variants) {
    if (v.variant_type == VariantType::kParaphrase) seen.insert(text::fold(v.input));
  }
  std::size_t attached = 0;
  for (const auto& candidate : candidates) {
    if (attached == limit) break;
    std::string key = text::fold(candidate);
    if (key.empty() || !seen.insert(key).second) continue;
    Instance variant = group.original;
    variant.variant_id = out.next_variant_id("p");
    variant.variant_type = VariantType::kParaphrase;
    variant.input = candidate;
    variant.perturbation_ops = {"paraphrase"};
    out.variants.push_back(std::move(variant));
    ++attached;
  }
  return out;
}

std::map<std::string, std::vector<std::string>> load_paraphrase_sidecar(
    const std::filesystem::path& path) {
  std::map<std::string, std::vector<std::string>> sidecar;
  for (const auto& record : read_jsonl(path).records) {
    const Json& v = record.value;
    if (!v.contains("group_id") || !v["group_id"].is_string() || !v.contains("paraphrases") ||
        !v["paraphrases"].is_array()) {
      throw Error(ErrorCode::kData,
                  fmt::format("{}:{}: expected {{group_id, paraphrases: [string]}}", path.string(),
                              record.line_no));
    }
    auto& list = sidecar[v["group_id"].get<std::string>()];
    for (const auto& p : v["paraphrases"]) {
      if (!p.is_string()) {
        throw Error(ErrorCode::kData,
                    fmt::format("{}:{}: paraphrases must be strings", path.string(), record.line_no));
      }
      list.push_back(p.get<std::string>());
    }
  }
  return sidecar;
}

ExpansionConfig ExpansionConfig::from_json(const Json& value, const std::filesystem::path& base_dir) {
  ExpansionConfig config;
  if (!value.is_object()) throw Error(ErrorCode::kInvalidArgument, "expansion config must be an object");
  if (auto it = value.find("superficial"); it != value.end()) {
    config.superficial_count = it->value("count", std::size_t{0});
    if (it->contains("kinds")) {
      for (const auto& k : (*it)["kinds"]) {
        config.superficial_kinds.push_back(parse_superficial_kind(k.get<std::string>()));
      }
    }
  }
  if (auto it = value.find("paraphrase"); it != value.end()) {
    const std::string source = it->value("source", std::string{});
    if (source.empty()) throw Error(ErrorCode::kInvalidArgument, "paraphrase.source is required");
    if (source == "provider") {
      config.paraphrase_from_provider = true;
    } else {
      config.paraphrase_file = resolve(base_dir, source);
    }
    config.paraphrase_limit = it->value("count", kMaxParaphrases);
    if (config.paraphrase_limit < 1 || config.paraphrase_limit > kMaxParaphrases) {
      throw Error(ErrorCode::kInvalidArgument,
                  fmt::format("paraphrase.count must be in [1, {}]", kMaxParaphrases));
    }
  }
  if (auto it = value.find("distraction"); it != value.end()) {
    config.distraction = parse_placement(it->value("placement", std::string{"random"}));
    if (it->contains("corpus")) {
      config.distraction_corpus = resolve(base_dir, (*it)["corpus"].get<std::string>());
    }
  }
  config.seed = value.value("seed", std::uint64_t{0});
  return config;
}

ExpansionResult expand_dataset(const Dataset& dataset, const ExpansionConfig& config,
                               const ParaphraseProvider& provider) {
  ExpansionResult result;
  result.dataset.name = dataset.name;

  std::vector<std::string> corpus;
  if (config.distraction) {
    for (const auto& g : dataset.groups) {
      if (!g.original.context) {
        throw Error(ErrorCode::kInvalidArgument,
                    fmt::format("distraction requires a context passage, but group {} "
                                "(dataset_kind {}) has none",
                                g.group_id, to_string(g.original.dataset_kind)));
      }
    }
    if (config.distraction_corpus) {
      corpus = load_corpus(*config.distraction_corpus);
    } else {
      std::set<std::string> seen;
      for (const auto& g : dataset.groups) {
        if (seen.insert(*g.original.context).second) corpus.push_back(*g.original.context);
      }
    }
  }

  std::map<std::string, std::vector<std::string>> sidecar;
  if (config.paraphrase_file) {
    sidecar = load_paraphrase_sidecar(*config.paraphrase_file);
    for (const auto& [id, _] : sidecar) {
      if (!dataset.find(id)) {
        result.warnings.push_back(fmt::format("paraphrase sidecar: unknown group_id {} skipped", id));
      }
    }
  }
  if (config.paraphrase_from_provider && !provider) {
    throw Error(ErrorCode::kInvalidArgument, "paraphrase source 'provider' needs a model configuration");
  }

  std::vector<SuperficialKind> pool = config.superficial_kinds;
  if (pool.empty()) pool.assign(kAllKinds.begin(), kAllKinds.end());

  for (const auto& input_group : dataset.groups) {
    PerturbationGroup group = input_group;
    if (config.superficial_count > 0) {
      const std::uint64_t group_seed = derive_seed(config.seed, group.group_id, "superficial");
      for (std::size_t j = 1; j <= config.superficial_count; ++j) {
        std::string produced;
        std::vector<SuperficialKind> kinds;
        for (int attempt = 0; attempt < kMaxVariantAttempts; ++attempt) {
          Rng rng(derive_seed(derive_seed(group_seed, j), static_cast<std::uint64_t>(attempt)));
          std::vector<SuperficialKind> shuffled = pool;
          const std::size_t n_kinds = 1 + uniform_index(rng, std::min(kMaxKindsPerVariant, pool.size()));
          for (std::size_t k = 0; k < n_kinds; ++k) {
            std::swap(shuffled[k], shuffled[k + uniform_index(rng, shuffled.size() - k)]);
          }
          kinds.assign(shuffled.begin(), shuffled.begin() + static_cast<long>(n_kinds));
          produced = apply_superficial(group.original.input, {kinds, rng()});
          const bool duplicate =
              produced == group.original.input ||
              std::any_of(group.variants.begin(), group.variants.end(),
                          [&](const Instance& v) { return v.input == produced; });
          if (!duplicate) break;
        }
        Instance variant = group.original;
        variant.variant_id = group.next_variant_id("s");
        variant.variant_type = VariantType::kSuperficial;
        variant.input = produced;
        for (auto k : kinds) variant.perturbation_ops.emplace_back(to_string(k));
        group.variants.push_back(std::move(variant));
        ++result.added[VariantType::kSuperficial];
      }
    }

    if (config.paraphrase_file || config.paraphrase_from_provider) {
      std::vector<std::string> candidates;
      bool ok = true;
      if (config.paraphrase_file) {
        if (auto it = sidecar.find(group.group_id); it != sidecar.end()) candidates = it->second;
      } else {
        try {
          candidates = provider(group.original);
        } catch (const std::exception& e) {
          result.failures.push_back({group.group_id, "", fmt::format("paraphrase provider: {}", e.what())});
          ok = false;
        }
      }
      if (ok) {
        const std::size_t n = group.variants.size();
        group = attach_paraphrases(group, candidates, config.paraphrase_limit);
        result.added[VariantType::kParaphrase] += group.variants.size() - n;
      }
    }

    if (config.distraction) {
      DistractionSpec spec{*config.distraction, derive_seed(config.seed, group.group_id, "distraction")};
      group.variants.push_back(add_distraction(group, corpus, spec));
      ++result.added[VariantType::kDistraction];
    }

    result.dataset.groups.push_back(std::move(group));
  }
  return result;
}

}  // namespace robeval
