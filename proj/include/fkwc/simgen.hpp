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
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "fkwc/core.hpp"

namespace fkwc {

/// Squared exponential kernel beta * exp(-(s-t)^2 / (2 alpha^2)).
struct KernelSpec {
  double alpha = 0.2;  // length-scale
  double beta = 1.0;   // magnitude

  void validate() const;
  friend bool operator==(const KernelSpec&, const KernelSpec&) = default;
};

enum class Distribution { kGauss, kT3, kSkewGauss };
enum class Layout { kNone, kAmoc, kEpidemic, kFiveAscending, kFiveAlternating };

std::string_view to_string(Distribution d);
std::string_view to_string(Layout l);
std::optional<Distribution> parse_distribution(std::string_view s);
std::optional<Layout> parse_layout(std::string_view s);

struct Segment {
  std::optional<std::size_t> length;  // drawn from the layout when absent
  KernelSpec kernel;
};

/// Segment counts per layout: NONE 1, AMOC 2, EPIDEMIC 2 or 3 (the third, if
/// given, must equal the first), FIVE_* 6. Lengths are either all given
/// (summing to n) or all absent.
struct Scenario {
  std::size_t n = 200;
  std::size_t grid_points = 100;
  Distribution distribution = Distribution::kGauss;
  Layout layout = Layout::kNone;
  std::vector<Segment> segments;
  std::uint64_t seed = 0;
  double skew_shape = 4.0;
  double t_df = 3.0;

  void validate() const;
};

/// Throws ValidationError on bad alpha/beta or a multi-dimensional grid.
Matrix kernel_matrix(const KernelSpec& spec, const Grid& grid);

/// Lower Cholesky factor of kernel_matrix plus a diagonal jitter of 1e-10 beta,
/// escalated tenfold up to three times on failure.
Matrix kernel_cholesky(const KernelSpec& spec, const Grid& grid);

/// Row i is a zero-mean Gaussian draw with covariance kernel_matrix, generated
/// from its own sub-seed (seed, i).
FunctionalSample gp_sample(const KernelSpec& spec, const Grid& grid, std::size_t count,
                           std::uint64_t seed);

/// Z / sqrt(W / df), W ~ chi^2_df per observation; covariance df/(df-2) K.
FunctionalSample t3_sample(const KernelSpec& spec, const Grid& grid, std::size_t count,
                           std::uint64_t seed, double df = 3.0);

/// delta |Z0| + sqrt(1-delta^2) Z1 - delta sqrt(2/pi) sqrt(beta), with
/// delta = shape / sqrt(1 + shape^2) and Z0, Z1 independent GP draws.
FunctionalSample skew_gauss_sample(const KernelSpec& spec, const Grid& grid, std::size_t count,
                                   double shape, std::uint64_t seed);

/// Change-points and segment lengths implied by the layout.
ChangePointSet scenario_truth(const Scenario& sc);

std::pair<FunctionalSample, ChangePointSet> build_scenario(const Scenario& sc);

/// JSON document: {"n", "grid_points"?, "distribution", "layout", "seed"?,
/// "skew_shape"?, "t_df"?, "segments": [{"alpha", "beta", "length"?}]}.
Scenario scenario_from_json(const std::string& text);
std::string scenario_to_json(const Scenario& sc);

}  // namespace fkwc
