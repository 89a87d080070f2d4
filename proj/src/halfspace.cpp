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

#include "fkwc/halfspace.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "fkwc/core.hpp"
#include "fkwc/rng.hpp"

namespace fkwc {
namespace {

struct Spoke {
  double key;  // monotone surrogate of the polar angle, in [0, 4)
  double dx;
  double dy;
};

// Diamond angle: cheap, monotone in atan2 and a genuine total order for sorting.
double diamond_angle(double dx, double dy) {
  if (dy >= 0.0) {
    return dx >= 0.0 ? dy / (dx + dy) : 1.0 - dx / (-dx + dy);
  }
  return dx < 0.0 ? 2.0 - dy / (-dx - dy) : 3.0 + dx / (dx - dy);
}

// Direction b lies in the half-open half-turn [angle(a), angle(a) + pi).
bool within_half_turn(const Spoke& a, const Spoke& b) {
  const double cross = a.dx * b.dy - a.dy * b.dx;
  if (cross > 0.0) return true;
  return cross == 0.0 && (a.dx * b.dx + a.dy * b.dy) > 0.0;
}

// Largest number of spokes inside any open half-plane through the origin.
std::size_t max_open_half_plane(std::vector<Spoke>& spokes) {
  const std::size_t m = spokes.size();
  std::sort(spokes.begin(), spokes.end(),
            [](const Spoke& a, const Spoke& b) { return a.key < b.key; });
  std::size_t best = 0;
  std::size_t j = 0;
  for (std::size_t i = 0; i < m; ++i) {
    j = std::max(j, i + 1);
    while (j < i + m && within_half_turn(spokes[i], spokes[j % m])) ++j;
    best = std::max(best, j - i);
  }
  return best;
}

double depth_2d_with_buffer(std::span<const Point2> points, Point2 x, std::vector<Spoke>& buf) {
  buf.clear();
  std::size_t at_x = 0;
  for (const Point2& p : points) {
    const double dx = p[0] - x[0];
    const double dy = p[1] - x[1];
    if (dx == 0.0 && dy == 0.0) {
      ++at_x;
    } else {
      buf.push_back({diamond_angle(dx, dy), dx, dy});
    }
  }
  const std::size_t n = points.size();
  if (buf.empty()) return static_cast<double>(at_x) / static_cast<double>(n);
  // Closed half-planes through x miss exactly an open half-plane of spokes.
  const std::size_t inside = at_x + buf.size() - max_open_half_plane(buf);
  return static_cast<double>(inside) / static_cast<double>(n);
}

}  // namespace

double halfspace_depth_1d(std::span<const double> points, double x) {
  if (points.empty()) throw ValidationError("halfspace depth needs a non-empty sample");
  std::size_t le = 0;
  std::size_t ge = 0;
  for (double p : points) {
    le += p <= x;
    ge += p >= x;
  }
  return static_cast<double>(std::min(le, ge)) / static_cast<double>(points.size());
}

std::vector<double> halfspace_depth_1d_all(std::span<const double> points) {
  const std::size_t n = points.size();
  std::vector<double> sorted(points.begin(), points.end());
  std::sort(sorted.begin(), sorted.end());
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto lo = std::lower_bound(sorted.begin(), sorted.end(), points[i]);
    const auto hi = std::upper_bound(lo, sorted.end(), points[i]);
    const auto le = static_cast<std::size_t>(hi - sorted.begin());
    const auto ge = static_cast<std::size_t>(sorted.end() - lo);
    out[i] = static_cast<double>(std::min(le, ge)) / static_cast<double>(n);
  }
  return out;
}

double halfspace_depth_2d(std::span<const Point2> points, Point2 x) {
  if (points.empty()) throw ValidationError("halfspace depth needs a non-empty sample");
  std::vector<Spoke> buf;
  buf.reserve(points.size());
  return depth_2d_with_buffer(points, x, buf);
}

std::vector<double> halfspace_depth_2d_all(std::span<const Point2> points) {
  std::vector<double> out(points.size());
  std::vector<Spoke> buf;
  buf.reserve(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) {
    out[i] = depth_2d_with_buffer(points, points[i], buf);
  }
  return out;
}

std::vector<std::vector<double>> random_unit_directions(std::size_t k, std::size_t count,
                                                        std::uint64_t seed) {
  Engine eng(seed);
  std::normal_distribution<double> normal;
  std::vector<std::vector<double>> dirs;
  dirs.reserve(count);
  while (dirs.size() < count) {
    std::vector<double> v(k);
    double norm = 0.0;
    for (double& c : v) {
      c = normal(eng);
      norm += c * c;
    }
    if (norm == 0.0) continue;
    norm = std::sqrt(norm);
    for (double& c : v) c /= norm;
    dirs.push_back(std::move(v));
  }
  return dirs;
}

double halfspace_depth_random(std::span<const double> points, std::size_t k,
                              std::span<const double> x, std::size_t directions,
                              std::uint64_t seed) {
  if (k == 0 || directions == 0) throw ValidationError("need k >= 1 and K >= 1");
  if (points.size() % k != 0 || x.size() != k || points.empty()) {
    throw ValidationError("point dimension mismatch");
  }
  const std::size_t n = points.size() / k;
  const auto dirs = random_unit_directions(k, directions, seed);
  std::size_t best = std::numeric_limits<std::size_t>::max();
  for (const auto& v : dirs) {
    double xv = 0.0;
    for (std::size_t c = 0; c < k; ++c) xv += x[c] * v[c];
    std::size_t count = 0;
    for (std::size_t j = 0; j < n; ++j) {
      double pv = 0.0;
      for (std::size_t c = 0; c < k; ++c) pv += points[j * k + c] * v[c];
      count += pv >= xv;
    }
    best = std::min(best, count);
  }
  return static_cast<double>(best) / static_cast<double>(n);
}

std::vector<double> halfspace_depth_random_all(std::span<const double> points, std::size_t k,
                                               std::size_t directions, std::uint64_t seed) {
  if (k == 0 || directions == 0) throw ValidationError("need k >= 1 and K >= 1");
  if (points.size() % k != 0) throw ValidationError("point dimension mismatch");
  const std::size_t n = points.size() / k;
  const auto dirs = random_unit_directions(k, directions, seed);
  std::vector<std::size_t> best(n, std::numeric_limits<std::size_t>::max());
  std::vector<double> proj(n);
  std::vector<double> sorted(n);
  for (const auto& v : dirs) {
    for (std::size_t j = 0; j < n; ++j) {
      double pv = 0.0;
      for (std::size_t c = 0; c < k; ++c) pv += points[j * k + c] * v[c];
      proj[j] = pv;
    }
    sorted = proj;
    std::sort(sorted.begin(), sorted.end());
    for (std::size_t i = 0; i < n; ++i) {
      const auto at_or_above = static_cast<std::size_t>(
          sorted.end() - std::lower_bound(sorted.begin(), sorted.end(), proj[i]));
      best[i] = std::min(best[i], at_or_above);
    }
  }
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    out[i] = static_cast<double>(best[i]) / static_cast<double>(n);
  }
  return out;
}

}  // namespace fkwc
