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

#include <string>
#include <string_view>

// UTF-8 text helpers shared by the perturbation and scoring code. All
// functions take and return UTF-8; case mapping works on code points.
namespace robeval::text {

std::u32string to_utf32(std::string_view utf8);
std::string to_utf8(std::u32string_view utf32);

char32_t to_upper(char32_t c);
char32_t to_lower(char32_t c);
bool is_upper(char32_t c);
bool is_lower(char32_t c);
bool is_alpha(char32_t c);
bool is_alnum(char32_t c);
bool is_space(char32_t c);

std::string upper(std::string_view s);
std::string lower(std::string_view s);

// Trims both ends and replaces every whitespace run with one ASCII space.
std::string collapse_whitespace(std::string_view s);

// collapse_whitespace followed by lower-casing; the comparison key used for
// containment scoring and paraphrase de-duplication.
std::string fold(std::string_view s);

std::string trim(std::string_view s);

}  // namespace robeval::text
