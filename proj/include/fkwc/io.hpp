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

#include <filesystem>
#include <string>

#include "fkwc/core.hpp"

namespace fkwc {

/// Magic prefix of the binary tensor format.
inline constexpr char kTensorMagic[8] = {'F', 'K', 'W', 'C', 'T', 'E', 'N', '1'};

/// Reads a rectangular numeric CSV (one observation per row) as a d=1 sample.
FunctionalSample load_csv(const std::filesystem::path& path, bool has_header);

/// Writes values as CSV with full round-trip precision. No header.
void save_csv(const FunctionalSample& sample, const std::filesystem::path& path);

/// Layout: "FKWCTEN1", u32 n, u32 d, d x u32 sizes, n*N float64, all little-endian,
/// values row-major. Gradients are not stored.
FunctionalSample load_tensor(const std::filesystem::path& path);
void save_tensor(const FunctionalSample& sample, const std::filesystem::path& path);

/// True when the file starts with the tensor magic.
bool is_tensor_file(const std::filesystem::path& path);

/// Dispatches on the file's magic bytes: tensor format, else CSV.
FunctionalSample load_sample(const std::filesystem::path& path, bool csv_has_header);

}  // namespace fkwc
