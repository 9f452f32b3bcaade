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

#include "robeval/jsonl.hpp"

#include <fstream>
#include <sstream>

#include <fmt/format.h>
#include <openssl/evp.h>

#include "robeval/error.hpp"

namespace robeval {

Json FileMeta::to_json() const {
  Json meta = extra;
  meta["tool"] = "robeval";
  meta["version"] = version;
  meta["config_hash"] = config_hash;
  meta["seed"] = seed;
  return meta;
}

JsonlFile read_jsonl(const std::filesystem::path& path, bool tolerate_truncated_tail) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, fmt::format("cannot open {}", path.string()));

  std::vector<std::pair<std::size_t, std::string>> lines;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    lines.emplace_back(line_no, std::move(line));
  }

  JsonlFile file;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    Json value;
    try {
      value = Json::parse(lines[i].second);
    } catch (const Json::parse_error& e) {
      if (tolerate_truncated_tail && i + 1 == lines.size()) break;
      throw Error(ErrorCode::kParse, fmt::format("{}:{}: malformed JSON line: {}",
                                                 path.string(), lines[i].first, e.what()));
    }
    if (!value.is_object()) {
      throw Error(ErrorCode::kParse, fmt::format("{}:{}: expected a JSON object",
                                                 path.string(), lines[i].first));
    }
    if (i == 0 && value.size() == 1 && value.contains("_meta")) {
      file.meta = value["_meta"];
      continue;
    }
    file.records.push_back({lines[i].first, std::move(value)});
  }
  return file;
}

std::string dump_compact(const Json& value) {
  return value.dump(-1, ' ', false, Json::error_handler_t::strict);
}

void write_jsonl(const std::filesystem::path& path, const std::optional<Json>& meta,
                 const std::vector<Json>& records) {
  std::ostringstream buf;
  if (meta) buf << dump_compact(Json{{"_meta", *meta}}) << '\n';
  for (const auto& r : records) buf << dump_compact(r) << '\n';

  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIo, fmt::format("cannot write {}", path.string()));
  out << buf.str();
  if (!out.flush()) throw Error(ErrorCode::kIo, fmt::format("write failed: {}", path.string()));
}

std::string sha256_hex(std::string_view bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    throw Error(ErrorCode::kInvalidArgument, "sha256 failed");
  }
  std::string hex;
  hex.reserve(len * 2);
  for (unsigned int i = 0; i < len; ++i) hex += fmt::format("{:02x}", digest[i]);
  return hex;
}

}  // namespace robeval
