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

#include "robeval/text.hpp"

#include <locale>

#include <boost/locale/encoding_utf.hpp>

namespace robeval::text {
namespace {

// Case mapping through the wchar_t ctype facet of a UTF-8 locale (wchar_t is
// UTF-32 on the supported platforms). Falls back to ASCII-only mapping when
// no UTF-8 locale is installed.
const std::ctype<wchar_t>& wide_ctype() {
  static const std::locale loc = [] {
    for (const char* name : {"C.UTF-8", "C.utf8", "en_US.UTF-8"}) {
      try {
        return std::locale(name);
      } catch (const std::runtime_error&) {
      }
    }
    return std::locale::classic();
  }();
  return std::use_facet<std::ctype<wchar_t>>(loc);
}

}  // namespace

std::u32string to_utf32(std::string_view utf8) {
  return boost::locale::conv::utf_to_utf<char32_t>(utf8.data(), utf8.data() + utf8.size());
}

std::string to_utf8(std::u32string_view utf32) {
  return boost::locale::conv::utf_to_utf<char>(utf32.data(), utf32.data() + utf32.size());
}

char32_t to_upper(char32_t c) {
  return static_cast<char32_t>(wide_ctype().toupper(static_cast<wchar_t>(c)));
}

char32_t to_lower(char32_t c) {
  return static_cast<char32_t>(wide_ctype().tolower(static_cast<wchar_t>(c)));
}

bool is_upper(char32_t c) { return wide_ctype().is(std::ctype_base::upper, static_cast<wchar_t>(c)); }
bool is_lower(char32_t c) { return wide_ctype().is(std::ctype_base::lower, static_cast<wchar_t>(c)); }
bool is_alpha(char32_t c) { return wide_ctype().is(std::ctype_base::alpha, static_cast<wchar_t>(c)); }
bool is_alnum(char32_t c) { return wide_ctype().is(std::ctype_base::alnum, static_cast<wchar_t>(c)); }

bool is_space(char32_t c) {
  if (c == U' ' || c == U'\t' || c == U'\n' || c == U'\r' || c == U'\v' || c == U'\f') return true;
  return c > 0x7f && wide_ctype().is(std::ctype_base::space, static_cast<wchar_t>(c));
}

std::string upper(std::string_view s) {
  auto u = to_utf32(s);
  for (auto& c : u) c = to_upper(c);
  return to_utf8(u);
}

std::string lower(std::string_view s) {
  auto u = to_utf32(s);
  for (auto& c : u) c = to_lower(c);
  return to_utf8(u);
}

std::string collapse_whitespace(std::string_view s) {
  std::u32string out;
  bool pending_space = false;
  for (char32_t c : to_utf32(s)) {
    if (is_space(c)) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) out.push_back(U' ');
    pending_space = false;
    out.push_back(c);
  }
  return to_utf8(out);
}

std::string fold(std::string_view s) { return lower(collapse_whitespace(s)); }

std::string trim(std::string_view s) {
  auto u = to_utf32(s);
  std::size_t b = 0, e = u.size();
  while (b < e && is_space(u[b])) ++b;
  while (e > b && is_space(u[e - 1])) --e;
  return to_utf8(std::u32string_view(u).substr(b, e - b));
}

}  // namespace robeval::text
