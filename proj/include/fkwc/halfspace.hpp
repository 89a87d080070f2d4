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

#include <array>
#include <cstdint>
#include <span>
#include <vector>

namespace fkwc {

using Point2 = std::array<double, 2>;

/// min(#{p <= x}, #{p >= x}) / n. Not capped at 1/2: a sample of copies of x
/// has depth 1.
double halfspace_depth_1d(std::span<const double> points, double x);

/// Exact bivariate Tukey depth by angular sweep, O(n log n).
double halfspace_depth_2d(std::span<const Point2> points, Point2 x);

/// Depth of every sample point w.r.t. the sample itself, 1-d. O(n log n).
std::vector<double> halfspace_depth_1d_all(std::span<const double> points);

/// Depth of every sample point w.r.t. the sample itself, exact 2-d. O(n^2 log n).
std::vector<double> halfspace_depth_2d_all(std::span<const Point2> points);

/// K uniformly random unit directions in R^k, deterministic in seed.
std::vector<std::vector<double>> random_unit_directions(std::size_t k, std::size_t count,
                                                        std::uint64_t seed);

/// Randomized Tukey depth: min over K random directions v of
/// #{j : <p_j - x, v> >= 0} / n. Never below the exact depth.
/// `points` holds n k-tuples contiguously.
double halfspace_depth_random(std::span<const double> points, std::size_t k,
                              std::span<const double> x, std::size_t directions,
                              std::uint64_t seed);

/// Randomized Tukey depth of every sample point, sharing one direction set.
std::vector<double> halfspace_depth_random_all(std::span<const double> points, std::size_t k,
                                               std::size_t directions, std::uint64_t seed);

}  // namespace fkwc
