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

#include "fkwc/reference.hpp"

#include "fkwc/halfspace.hpp"
#include "fkwc/rng.hpp"

namespace fkwc::reference {
namespace {

// Depth of tuple `i` among the n tuples (row-major, width k), one query at a time.
double tuple_depth(const std::vector<double>& tuples, std::size_t k, std::size_t i,
                   std::size_t tukey_directions, std::uint64_t seed) {
  const std::size_t n = tuples.size() / k;
  if (k == 1) return halfspace_depth_1d(tuples, tuples[i]);
  if (k == 2) {
    std::vector<Point2> pts(n);
    for (std::size_t j = 0; j < n; ++j) pts[j] = {tuples[2 * j], tuples[2 * j + 1]};
    return halfspace_depth_2d(pts, pts[i]);
  }
  return halfspace_depth_random(tuples, k, std::span(tuples).subspan(i * k, k), tukey_directions,
                                seed);
}

}  // namespace

DepthScores rp_depth_serial(const FunctionalSample& sample, const DirectionSet& dirs,
                            bool use_derivatives, std::size_t tukey_directions,
                            std::uint64_t tukey_seed) {
  if (sample.size() == 0) throw ValidationError("depth of an empty sample");
  if (use_derivatives && !sample.has_gradients()) {
    throw ValidationError("derivative depth requested but the sample has no gradients");
  }
  const std::size_t n = sample.size();
  const std::size_t k = use_derivatives ? 1 + sample.grid.dims() : 1;
  const auto weights = sample.grid.quadrature_weights();
  std::vector<double> total(n, 0.0);
  for (std::size_t m = 0; m < dirs.count(); ++m) {
    const auto u = dirs.directions.row(m);
    std::vector<double> tuples(n * k);
    for (std::size_t i = 0; i < n; ++i) {
      tuples[i * k] = weighted_dot(sample.values.row(i), u, weights);
      for (std::size_t a = 1; a < k; ++a) {
        tuples[i * k + a] = weighted_dot(sample.gradients[a - 1].row(i), u, weights);
      }
    }
    for (std::size_t i = 0; i < n; ++i) {
      if (!use_derivatives) {
        std::size_t le = 0;
        for (std::size_t j = 0; j < n; ++j) le += tuples[j] <= tuples[i];
        const double f = static_cast<double>(le) / static_cast<double>(n);
        total[i] += f * (1.0 - f);
      } else {
        total[i] += tuple_depth(tuples, k, i, tukey_directions, derive_seed(tukey_seed, m));
      }
    }
  }
  DepthScores scores{use_derivatives ? DepthMethod::kRpDeriv : DepthMethod::kRp, total};
  for (double& v : scores.values) v /= static_cast<double>(dirs.count());
  return scores;
}

DepthScores mfhd_depth_serial(const FunctionalSample& sample, bool use_derivatives,
                              std::size_t tukey_directions, std::uint64_t tukey_seed) {
  if (sample.size() == 0) throw ValidationError("depth of an empty sample");
  if (use_derivatives && !sample.has_gradients()) {
    throw ValidationError("derivative depth requested but the sample has no gradients");
  }
  const std::size_t n = sample.size();
  const std::size_t k = use_derivatives ? 1 + sample.grid.dims() : 1;
  const auto weights = sample.grid.quadrature_weights();
  DepthScores scores{use_derivatives ? DepthMethod::kMfhdDeriv : DepthMethod::kMfhd,
                     std::vector<double>(n, 0.0)};
  std::vector<double> tuples(n * k);
  for (std::size_t p = 0; p < sample.grid.total_points(); ++p) {
    for (std::size_t i = 0; i < n; ++i) {
      tuples[i * k] = sample.values(i, p);
      for (std::size_t a = 1; a < k; ++a) tuples[i * k + a] = sample.gradients[a - 1](i, p);
    }
    for (std::size_t i = 0; i < n; ++i) {
      scores.values[i] +=
          weights[p] * tuple_depth(tuples, k, i, tukey_directions, derive_seed(tukey_seed, p));
    }
  }
  return scores;
}

}  // namespace fkwc::reference
