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

#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace fkwc {

/// Raised when inputs violate a documented precondition.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Raised for unreadable, truncated or malformed files.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Dense row-major matrix. Rows are observations throughout the library.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  std::span<double> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
  std::span<const double> row(std::size_t r) const {
    return {data_.data() + r * cols_, cols_};
  }

  std::vector<double>& data() { return data_; }
  const std::vector<double>& data() const { return data_; }

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

/// Uniform tensor-product grid on [0,1]^d, endpoints included.
class Grid {
 public:
  Grid() = default;
  explicit Grid(std::vector<std::size_t> sizes);

  /// Shorthand for a one-dimensional grid with `points` nodes.
  static Grid line(std::size_t points) { return Grid({points}); }

  std::size_t dims() const { return sizes_.size(); }
  const std::vector<std::size_t>& sizes() const { return sizes_; }
  std::size_t total_points() const { return total_; }
  double spacing(std::size_t axis) const {
    return 1.0 / static_cast<double>(sizes_.at(axis) - 1);
  }

  /// Row-major stride of `axis` in a flattened grid function.
  std::size_t stride(std::size_t axis) const;

  /// Coordinate of grid node `index` along `axis`.
  double coordinate(std::size_t index, std::size_t axis) const;

  /// Tensor-product trapezoidal weights; they sum to 1.
  std::vector<double> quadrature_weights() const;

  friend bool operator==(const Grid&, const Grid&) = default;

 private:
  std::vector<std::size_t> sizes_;
  std::size_t total_ = 0;
};

/// n discretized functions sharing one grid, plus optional partial derivatives.
struct FunctionalSample {
  Grid grid;
  Matrix values;                  // n x N
  std::vector<Matrix> gradients;  // empty, or grid.dims() matrices of n x N

  std::size_t size() const { return values.rows(); }
  bool has_gradients() const { return !gradients.empty(); }

  /// Throws ValidationError on shape mismatches or non-finite values.
  void validate() const;
};

/// Ordered interior change-points 0 < k_1 < ... < k_l < n. A point k ends a
/// segment: the segment holds observations k_{i-1}+1 .. k_i (1-based).
class ChangePointSet {
 public:
  ChangePointSet() = default;
  ChangePointSet(std::size_t n, std::vector<std::size_t> points);

  std::size_t length() const { return n_; }
  const std::vector<std::size_t>& points() const { return points_; }
  std::size_t count() const { return points_.size(); }
  bool empty() const { return points_.empty(); }

  /// Segment boundaries 0, k_1, ..., k_l, n.
  std::vector<std::size_t> boundaries() const;

  friend bool operator==(const ChangePointSet&, const ChangePointSet&) = default;

 private:
  std::size_t n_ = 0;
  std::vector<std::size_t> points_;
};

/// Trapezoidal approximation of the integral of x*y over [0,1]^d.
double inner_product(std::span<const double> x, std::span<const double> y, const Grid& grid);

/// Same as inner_product but with precomputed weights from Grid::quadrature_weights().
double weighted_dot(std::span<const double> x, std::span<const double> y,
                    std::span<const double> weights);

double l2_norm_sq(std::span<const double> x, const Grid& grid);

/// Returns a copy with gradients filled in by finite differences: central at
/// interior nodes, one-sided at the boundary, per axis.
FunctionalSample finite_diff_gradient(const FunctionalSample& sample);

/// Subtracts the pointwise sample mean from every observation and gradient.
FunctionalSample center_pointwise(const FunctionalSample& sample);

}  // namespace fkwc
