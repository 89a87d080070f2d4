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

#include "fkwc/depth.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "fkwc/halfspace.hpp"
#include "fkwc/rng.hpp"

namespace fkwc {
namespace {

// Grid points per work block in the MFHD kernel. Partial sums are formed per
// block and reduced in block order, so results do not depend on thread count.
constexpr std::size_t kMfhdBlock = 64;

double basis_1d(std::size_t index, double t) {
  if (index == 0) return 1.0;
  const double f = static_cast<double>((index + 1) / 2);
  const double arg = 2.0 * std::numbers::pi * f * t;
  return std::numbers::sqrt2 * (index % 2 == 1 ? std::sin(arg) : std::cos(arg));
}

// Multi-indices in graded order: all with max entry L (lexicographic) before L+1.
std::vector<std::vector<std::size_t>> graded_indices(std::size_t dims, std::size_t count) {
  std::vector<std::vector<std::size_t>> out;
  for (std::size_t level = 0; out.size() < count; ++level) {
    std::vector<std::size_t> idx(dims, 0);
    while (true) {
      if (*std::max_element(idx.begin(), idx.end()) == level) {
        out.push_back(idx);
        if (out.size() == count) return out;
      }
      std::ptrdiff_t a = static_cast<std::ptrdiff_t>(dims) - 1;
      while (a >= 0 && idx[a] == level) idx[a--] = 0;
      if (a < 0) break;
      ++idx[a];
    }
  }
  return out;
}

// Empirical CDF F(p_i) = #{j : p_j <= p_i} / n for every i.
std::vector<double> empirical_cdf(std::span<const double> values) {
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  const auto n = static_cast<double>(values.size());
  std::vector<double> out(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    const auto le = std::upper_bound(sorted.begin(), sorted.end(), values[i]) - sorted.begin();
    out[i] = static_cast<double>(le) / n;
  }
  return out;
}

void require_gradients(const FunctionalSample& sample, bool use_derivatives) {
  if (sample.size() == 0) throw ValidationError("depth of an empty sample");
  if (use_derivatives && !sample.has_gradients()) {
    throw ValidationError("derivative depth requested but the sample has no gradients");
  }
}

// Tukey depth of every row of a row-major n x k tuple array.
std::vector<double> tuple_depths(std::span<const double> tuples, std::size_t k,
                                 std::size_t tukey_directions, std::uint64_t seed) {
  if (k == 1) return halfspace_depth_1d_all(tuples);
  if (k == 2) {
    std::vector<Point2> pts(tuples.size() / 2);
    for (std::size_t i = 0; i < pts.size(); ++i) pts[i] = {tuples[2 * i], tuples[2 * i + 1]};
    return halfspace_depth_2d_all(pts);
  }
  return halfspace_depth_random_all(tuples, k, tukey_directions, seed);
}

}  // namespace

std::string_view to_string(DepthMethod m) {
  switch (m) {
    case DepthMethod::kRp: return "rp";
    case DepthMethod::kRpDeriv: return "rp-deriv";
    case DepthMethod::kMfhd: return "mfhd";
    case DepthMethod::kMfhdDeriv: return "mfhd-deriv";
    case DepthMethod::kNorm: return "norm";
    case DepthMethod::kNormDeriv: return "norm-deriv";
  }
  return "?";
}

std::optional<DepthMethod> parse_depth_method(std::string_view s) {
  for (auto m : {DepthMethod::kRp, DepthMethod::kRpDeriv, DepthMethod::kMfhd,
                 DepthMethod::kMfhdDeriv, DepthMethod::kNorm, DepthMethod::kNormDeriv}) {
    if (to_string(m) == s) return m;
  }
  return std::nullopt;
}

bool uses_derivatives(DepthMethod m) {
  return m == DepthMethod::kRpDeriv || m == DepthMethod::kMfhdDeriv ||
         m == DepthMethod::kNormDeriv;
}

Matrix fourier_basis(const Grid& grid, std::size_t count) {
  if (count == 0) throw ValidationError("basis size must be at least 1");
  const auto indices = graded_indices(grid.dims(), count);
  for (const auto& idx : indices) {
    for (std::size_t a = 0; a < idx.size(); ++a) {
      const std::size_t freq = (idx[a] + 1) / 2;
      if (2 * freq >= grid.sizes()[a]) {
        throw ValidationError("basis size " + std::to_string(count) +
                              " needs frequency " + std::to_string(freq) +
                              " which is not below half the grid size on axis " +
                              std::to_string(a));
      }
    }
  }
  const std::size_t total = grid.total_points();
  Matrix basis(count, total);
  for (std::size_t b = 0; b < count; ++b) {
    for (std::size_t p = 0; p < total; ++p) {
      double v = 1.0;
      for (std::size_t a = 0; a < grid.dims(); ++a) {
        v *= basis_1d(indices[b][a], grid.coordinate(p, a));
      }
      basis(b, p) = v;
    }
  }
  return basis;
}

DirectionSet draw_directions(const Grid& grid, std::size_t count, std::size_t basis_size,
                             std::uint64_t seed) {
  if (count == 0) throw ValidationError("need at least one direction");
  const Matrix basis = fourier_basis(grid, basis_size);
  const auto weights = grid.quadrature_weights();
  const std::size_t total = grid.total_points();
  DirectionSet set{grid, basis_size, seed, Matrix(count, total)};
  Engine eng(seed);
  std::normal_distribution<double> normal;
  std::vector<double> coef(basis_size);
  for (std::size_t m = 0; m < count; ++m) {
    double norm_sq = 0.0;
    auto u = set.directions.row(m);
    do {
      for (double& c : coef) c = normal(eng);
      if (coef[0] < 0.0) {
        for (double& c : coef) c = -c;
      }
      std::fill(u.begin(), u.end(), 0.0);
      for (std::size_t b = 0; b < basis_size; ++b) {
        const auto phi = basis.row(b);
        for (std::size_t p = 0; p < total; ++p) u[p] += coef[b] * phi[p];
      }
      norm_sq = weighted_dot(u, u, weights);
    } while (norm_sq <= 0.0);
    const double scale = 1.0 / std::sqrt(norm_sq);
    for (double& v : u) v *= scale;
  }
  return set;
}

DepthScores rp_depth(const FunctionalSample& sample, const DirectionSet& dirs,
                     bool use_derivatives, std::size_t tukey_directions,
                     std::uint64_t tukey_seed) {
  require_gradients(sample, use_derivatives);
  if (!(dirs.grid == sample.grid)) throw ValidationError("direction grid does not match sample");
  const std::size_t n = sample.size();
  const std::size_t M = dirs.count();
  const std::size_t k = use_derivatives ? 1 + sample.grid.dims() : 1;
  const auto weights = sample.grid.quadrature_weights();

  // Projections: one n x k tuple array per direction.
  Matrix per_direction(M, n);
  const auto m_count = static_cast<std::ptrdiff_t>(M);
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t mi = 0; mi < m_count; ++mi) {
    const auto m = static_cast<std::size_t>(mi);
    const auto u = dirs.directions.row(m);
    std::vector<double> tuples(n * k);
    for (std::size_t i = 0; i < n; ++i) {
      tuples[i * k] = weighted_dot(sample.values.row(i), u, weights);
      for (std::size_t a = 1; a < k; ++a) {
        tuples[i * k + a] = weighted_dot(sample.gradients[a - 1].row(i), u, weights);
      }
    }
    auto out = per_direction.row(m);
    if (!use_derivatives) {
      const auto cdf = empirical_cdf(tuples);
      for (std::size_t i = 0; i < n; ++i) out[i] = cdf[i] * (1.0 - cdf[i]);
    } else {
      const auto d = tuple_depths(tuples, k, tukey_directions, derive_seed(tukey_seed, m));
      std::copy(d.begin(), d.end(), out.begin());
    }
  }

  DepthScores scores{use_derivatives ? DepthMethod::kRpDeriv : DepthMethod::kRp,
                     std::vector<double>(n, 0.0)};
  for (std::size_t m = 0; m < M; ++m) {
    const auto row = per_direction.row(m);
    for (std::size_t i = 0; i < n; ++i) scores.values[i] += row[i];
  }
  for (double& v : scores.values) v /= static_cast<double>(M);
  return scores;
}

DepthScores mfhd_depth(const FunctionalSample& sample, bool use_derivatives,
                       std::size_t tukey_directions, std::uint64_t tukey_seed) {
  require_gradients(sample, use_derivatives);
  const std::size_t n = sample.size();
  const std::size_t total = sample.grid.total_points();
  const std::size_t k = use_derivatives ? 1 + sample.grid.dims() : 1;
  const auto weights = sample.grid.quadrature_weights();
  const std::size_t blocks = (total + kMfhdBlock - 1) / kMfhdBlock;

  Matrix partial(blocks, n);
  const auto block_count = static_cast<std::ptrdiff_t>(blocks);
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t bi = 0; bi < block_count; ++bi) {
    const auto b = static_cast<std::size_t>(bi);
    auto acc = partial.row(b);
    std::vector<double> tuples(n * k);
    const std::size_t end = std::min(total, (b + 1) * kMfhdBlock);
    for (std::size_t p = b * kMfhdBlock; p < end; ++p) {
      for (std::size_t i = 0; i < n; ++i) {
        tuples[i * k] = sample.values(i, p);
        for (std::size_t a = 1; a < k; ++a) tuples[i * k + a] = sample.gradients[a - 1](i, p);
      }
      const auto d = tuple_depths(tuples, k, tukey_directions, derive_seed(tukey_seed, p));
      for (std::size_t i = 0; i < n; ++i) acc[i] += weights[p] * d[i];
    }
  }

  DepthScores scores{use_derivatives ? DepthMethod::kMfhdDeriv : DepthMethod::kMfhd,
                     std::vector<double>(n, 0.0)};
  for (std::size_t b = 0; b < blocks; ++b) {
    const auto row = partial.row(b);
    for (std::size_t i = 0; i < n; ++i) scores.values[i] += row[i];
  }
  return scores;
}

DepthScores norm_scores(const FunctionalSample& sample, bool use_derivatives) {
  require_gradients(sample, use_derivatives);
  const std::size_t n = sample.size();
  const auto weights = sample.grid.quadrature_weights();
  DepthScores scores{use_derivatives ? DepthMethod::kNormDeriv : DepthMethod::kNorm,
                     std::vector<double>(n)};
  const auto count = static_cast<std::ptrdiff_t>(n);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t ii = 0; ii < count; ++ii) {
    const auto i = static_cast<std::size_t>(ii);
    const auto x = sample.values.row(i);
    double total = weighted_dot(x, x, weights);
    if (use_derivatives) {
      for (const Matrix& g : sample.gradients) total += weighted_dot(g.row(i), g.row(i), weights);
    }
    scores.values[i] = -total;
  }
  return scores;
}

DepthScores compute_depth(const FunctionalSample& sample, DepthMethod method,
                          const DepthOptions& options) {
  const bool deriv = uses_derivatives(method);
  const FunctionalSample* src = &sample;
  FunctionalSample with_gradients;
  if (deriv && !sample.has_gradients()) {
    with_gradients = finite_diff_gradient(sample);
    src = &with_gradients;
  }
  const std::uint64_t tukey_seed = derive_seed(options.seed, kTukeyStream);
  switch (method) {
    case DepthMethod::kRp:
    case DepthMethod::kRpDeriv: {
      const auto dirs = draw_directions(src->grid, options.projections, options.basis_size,
                                        derive_seed(options.seed, kDirectionStream));
      return rp_depth(*src, dirs, deriv, options.tukey_directions, tukey_seed);
    }
    case DepthMethod::kMfhd:
    case DepthMethod::kMfhdDeriv:
      return mfhd_depth(*src, deriv, options.tukey_directions, tukey_seed);
    case DepthMethod::kNorm:
    case DepthMethod::kNormDeriv:
      return norm_scores(*src, deriv);
  }
  throw ValidationError("unknown depth method");
}

}  // namespace fkwc
