// Copyright 2026 The FKWC Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <random>

namespace fkwc {

using Engine = std::mt19937_64;

/// SplitMix64 finalizer; used to derive independent sub-seeds from a master
/// seed and a stream index, so parallel work never shares an engine.
constexpr std::uint64_t mix_seed(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream) {
  return mix_seed(mix_seed(master) ^ mix_seed(stream + 0x632be59bd9b4e019ULL));
}

inline Engine make_engine(std::uint64_t master, std::uint64_t stream) {
  return Engine(derive_seed(master, stream));
}

// Stream tags for the pipeline's sub-seeds.
inline constexpr std::uint64_t kDirectionStream = 1;
inline constexpr std::uint64_t kTukeyStream = 2;
inline constexpr std::uint64_t kNullStream = 3;

}  // namespace fkwc
