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

#include "fkwc/core.hpp"

#include <cmath>
#include <string>

namespace fkwc {

Grid::Grid(std::vector<std::size_t> sizes) : sizes_(std::move(sizes)) {
  if (sizes_.empty()) throw ValidationError("grid must have at least one axis");
  total_ = 1;
  for (std::size_t s : sizes_) {
    if (s < 2) throw ValidationError("every grid axis needs at least 2 points");
    total_ *= s;
  }
}

std::size_t Grid::stride(std::size_t axis) const {
  std::size_t s = 1;
  for (std::size_t a = axis + 1; a < sizes_.size(); ++a) s *= sizes_[a];
  return s;
}

double Grid::coordinate(std::size_t index, std::size_t axis) const {
  const std::size_t along = (index / stride(axis)) % sizes_[axis];
  return static_cast<double>(along) * spacing(axis);
}

std::vector<double> Grid::quadrature_weights() const {
  std::vector<double> w(total_, 1.0);
  for (std::size_t axis = 0; axis < dims(); ++axis) {
    const std::size_t st = stride(axis);
    const std::size_t len = sizes_[axis];
    const double h = spacing(axis);
    for (std::size_t i = 0; i < total_; ++i) {
      const std::size_t along = (i / st) % len;
      w[i] *= (along == 0 || along + 1 == len) ? 0.5 * h : h;
    }
  }
  return w;
}

void FunctionalSample::validate() const {
  if (values.cols() != grid.total_points()) {
    throw ValidationError("sample width " + std::to_string(values.cols()) +
                          " does not match grid size " + std::to_string(grid.total_points()));
  }
  for (double v : values.data()) {
    if (!std::isfinite(v)) throw ValidationError("sample contains non-finite values");
  }
  if (!gradients.empty()) {
    if (gradients.size() != grid.dims()) {
      throw ValidationError("gradient count must equal grid dimension");
    }
    for (const Matrix& g : gradients) {
      if (g.rows() != values.rows() || g.cols() != values.cols()) {
        throw ValidationError("gradient shape does not match values");
      }
    }
  }
}

ChangePointSet::ChangePointSet(std::size_t n, std::vector<std::size_t> points)
    : n_(n), points_(std::move(points)) {
  std::size_t prev = 0;
  for (std::size_t k : points_) {
    if (k <= prev || k >= n_) {
      throw ValidationError("change-points must be strictly increasing in (0, n)");
    }
    prev = k;
  }
}

std::vector<std::size_t> ChangePointSet::boundaries() const {
  std::vector<std::size_t> b;
  b.reserve(points_.size() + 2);
  b.push_back(0);
  b.insert(b.end(), points_.begin(), points_.end());
  b.push_back(n_);
  return b;
}

double weighted_dot(std::span<const double> x, std::span<const double> y,
                    std::span<const double> weights) {
  double acc = 0.0;
  for (std::size_t i = 0; i < weights.size(); ++i) acc += weights[i] * x[i] * y[i];
  return acc;
}

double inner_product(std::span<const double> x, std::span<const double> y, const Grid& grid) {
  if (x.size() != grid.total_points() || y.size() != grid.total_points()) {
    throw ValidationError("grid mismatch in inner product");
  }
  const auto w = grid.quadrature_weights();
  return weighted_dot(x, y, w);
}

double l2_norm_sq(std::span<const double> x, const Grid& grid) {
  return inner_product(x, x, grid);
}

FunctionalSample finite_diff_gradient(const FunctionalSample& sample) {
  FunctionalSample out{sample.grid, sample.values, {}};
  const Grid& grid = sample.grid;
  const std::size_t n = sample.size();
  const std::size_t total = grid.total_points();
  out.gradients.reserve(grid.dims());
  for (std::size_t axis = 0; axis < grid.dims(); ++axis) {
    Matrix g(n, total);
    const std::size_t st = grid.stride(axis);
    const std::size_t len = grid.sizes()[axis];
    const double h = grid.spacing(axis);
    for (std::size_t i = 0; i < n; ++i) {
      const auto x = sample.values.row(i);
      auto gi = g.row(i);
      for (std::size_t p = 0; p < total; ++p) {
        const std::size_t along = (p / st) % len;
        if (along == 0) {
          gi[p] = (x[p + st] - x[p]) / h;
        } else if (along + 1 == len) {
          gi[p] = (x[p] - x[p - st]) / h;
        } else {
          gi[p] = (x[p + st] - x[p - st]) / (2.0 * h);
        }
      }
    }
    out.gradients.push_back(std::move(g));
  }
  return out;
}

namespace {

void subtract_column_means(Matrix& m) {
  const std::size_t n = m.rows();
  if (n == 0) return;
  std::vector<double> mean(m.cols(), 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const auto x = m.row(i);
    for (std::size_t p = 0; p < x.size(); ++p) mean[p] += x[p];
  }
  for (double& v : mean) v /= static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i) {
    auto x = m.row(i);
    for (std::size_t p = 0; p < x.size(); ++p) x[p] -= mean[p];
  }
}

}  // namespace

// Differencing is linear, so centering the gradients directly matches
// differencing the centered values.
FunctionalSample center_pointwise(const FunctionalSample& sample) {
  FunctionalSample out = sample;
  subtract_column_means(out.values);
  for (Matrix& g : out.gradients) subtract_column_means(g);
  return out;
}

}  // namespace fkwc
