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
#include <vector>

#include "fkwc/core.hpp"

namespace fkwc {

enum class DepthMethod { kRp, kRpDeriv, kMfhd, kMfhdDeriv, kNorm, kNormDeriv };

std::string_view to_string(DepthMethod m);
/// Accepts the CLI spellings: rp, rp-deriv, mfhd, mfhd-deriv, norm, norm-deriv.
std::optional<DepthMethod> parse_depth_method(std::string_view s);
bool uses_derivatives(DepthMethod m);

/// M random unit-norm grid functions synthesized from a tensor Fourier basis.
struct DirectionSet {
  Grid grid;
  std::size_t basis_size = 0;
  std::uint64_t seed = 0;
  Matrix directions;  // M x N, rows have unit trapezoidal L2 norm

  std::size_t count() const { return directions.rows(); }
};

/// One score per observation; larger means deeper for every method.
struct DepthScores {
  DepthMethod method = DepthMethod::kRp;
  std::vector<double> values;
};

/// Tensor-product Fourier basis in graded order: constant first, then
/// sqrt(2) sin / sqrt(2) cos pairs, ordered by the largest per-axis index.
/// Throws if a needed frequency is not below N_j / 2 on some axis.
Matrix fourier_basis(const Grid& grid, std::size_t count);

/// Each direction is sum_b c_b phi_b with c ~ iid N(0,1), normalized to unit
/// norm and signed so the constant coefficient is non-negative.
DirectionSet draw_directions(const Grid& grid, std::size_t count, std::size_t basis_size,
                             std::uint64_t seed);

struct DepthOptions {
  std::size_t projections = 50;       // M
  std::size_t basis_size = 21;        // B
  std::size_t tukey_directions = 500; // K, used when the tuple dimension is >= 3
  std::uint64_t seed = 0;             // directions and randomized Tukey streams
};

/// Random projection depth. Without derivatives the univariate depth is
/// F(1-F) of the projected empirical CDF; with derivatives it is the Tukey
/// depth of the (1+d)-tuple of projections of the function and its gradient.
DepthScores rp_depth(const FunctionalSample& sample, const DirectionSet& dirs,
                     bool use_derivatives, std::size_t tukey_directions = 500,
                     std::uint64_t tukey_seed = 0);

/// Multivariate functional halfspace depth: trapezoidal average over the grid
/// of pointwise Tukey depths of x(t), or of (x(t), grad x(t)).
DepthScores mfhd_depth(const FunctionalSample& sample, bool use_derivatives,
                       std::size_t tukey_directions = 500, std::uint64_t tukey_seed = 0);

/// Negated squared L2 norms (plus squared gradient norms with derivatives).
DepthScores norm_scores(const FunctionalSample& sample, bool use_derivatives);

/// Dispatches on `method`; computes gradients by finite differences when the
/// method needs them and the sample has none.
DepthScores compute_depth(const FunctionalSample& sample, DepthMethod method,
                          const DepthOptions& options);

}  // namespace fkwc
