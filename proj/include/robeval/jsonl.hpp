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
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

namespace robeval {

using Json = nlohmann::json;

// Provenance written as the first record of every file the toolkit emits.
struct FileMeta {
  std::string version = ROBEVAL_VERSION_STRING;
  std::string config_hash;
  std::uint64_t seed = 0;
  Json extra = Json::object();

  Json to_json() const;
};

struct JsonlRecord {
  std::size_t line_no = 0;
  Json value;
};

struct JsonlFile {
  std::optional<Json> meta;  // contents of the leading {"_meta": {...}} line
  std::vector<JsonlRecord> records;
};

// Blank lines are skipped. A malformed line throws kParse naming the line,
// except a malformed final line when `tolerate_truncated_tail` is set (used
// for append-only files that may have been cut short by a crash).
JsonlFile read_jsonl(const std::filesystem::path& path, bool tolerate_truncated_tail = false);

// Compact, UTF-8 preserving, no trailing newline.
std::string dump_compact(const Json& value);

void write_jsonl(const std::filesystem::path& path, const std::optional<Json>& meta,
                 const std::vector<Json>& records);

std::string sha256_hex(std::string_view bytes);

}  // namespace robeval
