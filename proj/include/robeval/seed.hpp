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

#include <cstdint>
#include <random>
#include <string_view>

namespace robeval {

using Rng = std::mt19937_64;

// Stable across platforms and releases: FNV-1a over the label bytes, mixed
// into the master seed with the splitmix64 finalizer.
std::uint64_t derive_seed(std::uint64_t master, std::string_view label);
std::uint64_t derive_seed(std::uint64_t master, std::string_view a, std::string_view b);
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index);

std::uint64_t fnv1a64(std::string_view bytes);

// Uniform draw in [0, n) by rejection; unlike std::uniform_int_distribution
// the sequence is identical on every standard library.
std::uint64_t uniform_index(Rng& rng, std::uint64_t n);

}  // namespace robeval
