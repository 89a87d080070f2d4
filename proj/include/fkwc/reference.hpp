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

// Straightforward single-threaded depth kernels. They count directly instead
// of sorting and evaluate one query point at a time, which makes them an
// independent check on the parallel kernels in depth.hpp and the baseline in
// the benchmark.

#include "fkwc/depth.hpp"

namespace fkwc::reference {

DepthScores rp_depth_serial(const FunctionalSample& sample, const DirectionSet& dirs,
                            bool use_derivatives, std::size_t tukey_directions = 500,
                            std::uint64_t tukey_seed = 0);

DepthScores mfhd_depth_serial(const FunctionalSample& sample, bool use_derivatives,
                              std::size_t tukey_directions = 500, std::uint64_t tukey_seed = 0);

}  // namespace fkwc::reference
