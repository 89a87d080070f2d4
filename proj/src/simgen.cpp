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

#include "fkwc/simgen.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Core>
#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "fkwc/rng.hpp"
#include "json.hpp"

namespace fkwc {

namespace {

constexpr std::uint64_t kLayoutStream = 0x100;
constexpr std::uint64_t kSegmentStream = 0x200;

using RowMajor = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// x = L z for one observation; z drawn from `eng`.
void correlated_draw(const Matrix& chol, Engine& eng, std::vector<double>& z,
                     std::span<double> out) {
  std::normal_distribution<double> normal;
  const std::size_t m = chol.rows();
  for (double& v : z) v = normal(eng);
  for (std::size_t i = 0; i < m; ++i) {
    double acc = 0.0;
    for (std::size_t j = 0; j <= i; ++j) acc += chol(i, j) * z[j];
    out[i] = acc;
  }
}

template <typename Fn>
FunctionalSample draw_sample(const Grid& grid, std::size_t count, Fn&& draw_row) {
  FunctionalSample s{grid, Matrix(count, grid.total_points()), {}};
  const auto rows = static_cast<std::int64_t>(count);
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < rows; ++i) {
    draw_row(static_cast<std::size_t>(i), s.values.row(static_cast<std::size_t>(i)));
  }
  return s;
}

}  // namespace

void KernelSpec::validate() const {
  if (!(alpha > 0.0) || !std::isfinite(alpha)) throw ValidationError("kernel alpha must be > 0");
  if (!(beta > 0.0) || !std::isfinite(beta)) throw ValidationError("kernel beta must be > 0");
}

std::string_view to_string(Distribution d) {
  switch (d) {
    case Distribution::kGauss: return "gauss";
    case Distribution::kT3: return "t3";
    case Distribution::kSkewGauss: return "skew-gauss";
  }
  return "?";
}

std::string_view to_string(Layout l) {
  switch (l) {
    case Layout::kNone: return "none";
    case Layout::kAmoc: return "amoc";
    case Layout::kEpidemic: return "epidemic";
    case Layout::kFiveAscending: return "five-ascending";
    case Layout::kFiveAlternating: return "five-alternating";
  }
  return "?";
}

std::optional<Distribution> parse_distribution(std::string_view s) {
  for (auto d : {Distribution::kGauss, Distribution::kT3, Distribution::kSkewGauss}) {
    if (to_string(d) == s) return d;
  }
  return std::nullopt;
}

std::optional<Layout> parse_layout(std::string_view s) {
  for (auto l : {Layout::kNone, Layout::kAmoc, Layout::kEpidemic, Layout::kFiveAscending,
                 Layout::kFiveAlternating}) {
    if (to_string(l) == s) return l;
  }
  return std::nullopt;
}

Matrix kernel_matrix(const KernelSpec& spec, const Grid& grid) {
  spec.validate();
  if (grid.dims() != 1) throw ValidationError("kernel_matrix needs a one-dimensional grid");
  const std::size_t m = grid.total_points();
  Matrix k(m, m);
  const double denom = 2.0 * spec.alpha * spec.alpha;
  for (std::size_t i = 0; i < m; ++i) {
    k(i, i) = spec.beta;
    for (std::size_t j = 0; j < i; ++j) {
      const double d = grid.coordinate(i, 0) - grid.coordinate(j, 0);
      const double v = spec.beta * std::exp(-(d * d) / denom);
      k(i, j) = v;
      k(j, i) = v;
    }
  }
  return k;
}

Matrix kernel_cholesky(const KernelSpec& spec, const Grid& grid) {
  const Matrix k = kernel_matrix(spec, grid);
  const std::size_t m = k.rows();
  const auto em = static_cast<Eigen::Index>(m);
  double jitter = 1e-10 * spec.beta;
  for (int attempt = 0; attempt <= 3; ++attempt, jitter *= 10.0) {
    RowMajor a = Eigen::Map<const RowMajor>(k.data().data(), em, em);
    a.diagonal().array() += jitter;
    Eigen::LLT<RowMajor> llt(a);
    if (llt.info() != Eigen::Success) continue;
    const RowMajor l = llt.matrixL();
    Matrix out(m, m);
    std::copy(l.data(), l.data() + l.size(), out.data().begin());
    return out;
  }
  throw ValidationError("kernel matrix is not positive definite after jitter escalation");
}

FunctionalSample gp_sample(const KernelSpec& spec, const Grid& grid, std::size_t count,
                           std::uint64_t seed) {
  const Matrix chol = kernel_cholesky(spec, grid);
  return draw_sample(grid, count, [&](std::size_t i, std::span<double> out) {
    Engine eng = make_engine(seed, i);
    std::vector<double> z(out.size());
    correlated_draw(chol, eng, z, out);
  });
}

FunctionalSample t3_sample(const KernelSpec& spec, const Grid& grid, std::size_t count,
                           std::uint64_t seed, double df) {
  if (!(df > 0.0)) throw ValidationError("degrees of freedom must be positive");
  const Matrix chol = kernel_cholesky(spec, grid);
  return draw_sample(grid, count, [&](std::size_t i, std::span<double> out) {
    Engine eng = make_engine(seed, i);
    std::vector<double> z(out.size());
    correlated_draw(chol, eng, z, out);
    std::chi_squared_distribution<double> chi(df);
    const double scale = 1.0 / std::sqrt(chi(eng) / df);
    for (double& v : out) v *= scale;
  });
}

FunctionalSample skew_gauss_sample(const KernelSpec& spec, const Grid& grid, std::size_t count,
                                   double shape, std::uint64_t seed) {
  if (!std::isfinite(shape)) throw ValidationError("skew shape must be finite");
  const Matrix chol = kernel_cholesky(spec, grid);
  const double delta = shape / std::sqrt(1.0 + shape * shape);
  const double rest = std::sqrt(1.0 - delta * delta);
  const double shift = delta * std::sqrt(2.0 / std::numbers::pi) * std::sqrt(spec.beta);
  return draw_sample(grid, count, [&](std::size_t i, std::span<double> out) {
    Engine eng = make_engine(seed, i);
    std::vector<double> z(out.size());
    std::vector<double> z0(out.size());
    correlated_draw(chol, eng, z, z0);
    correlated_draw(chol, eng, z, out);
    for (std::size_t p = 0; p < out.size(); ++p) {
      out[p] = delta * std::abs(z0[p]) + rest * out[p] - shift;
    }
  });
}

namespace {

std::size_t expected_segments(Layout l) {
  switch (l) {
    case Layout::kNone: return 1;
    case Layout::kAmoc: return 2;
    case Layout::kEpidemic: return 3;
    case Layout::kFiveAscending:
    case Layout::kFiveAlternating: return 6;
  }
  return 0;
}

// Segment specs with the epidemic return segment filled in.
std::vector<KernelSpec> resolved_kernels(const Scenario& sc) {
  std::vector<KernelSpec> k;
  for (const Segment& s : sc.segments) k.push_back(s.kernel);
  if (sc.layout == Layout::kEpidemic && k.size() == 2) k.push_back(k[0]);
  return k;
}

// `count` points with every segment (ends included) at least ceil(0.1 n) long.
std::vector<std::size_t> spaced_points(std::size_t n, std::size_t count, Engine& eng) {
  const std::size_t gap = (n + 9) / 10;
  if (gap * (count + 1) > n) throw ValidationError("n too small for the layout's spacing");
  const std::size_t slack = n - gap * (count + 1);
  std::uniform_int_distribution<std::size_t> u(0, slack);
  std::vector<std::size_t> offs(count);
  for (auto& o : offs) o = u(eng);
  std::sort(offs.begin(), offs.end());
  std::vector<std::size_t> pts(count);
  for (std::size_t i = 0; i < count; ++i) pts[i] = gap * (i + 1) + offs[i];
  return pts;
}

}  // namespace

void Scenario::validate() const {
  if (n < 2) throw ValidationError("scenario needs n >= 2");
  if (grid_points < 2) throw ValidationError("scenario needs at least 2 grid points");
  if (segments.empty()) throw ValidationError("scenario needs at least one segment");
  for (const Segment& s : segments) s.kernel.validate();
  const std::size_t want = expected_segments(layout);
  const bool epi_short = layout == Layout::kEpidemic && segments.size() == 2;
  if (segments.size() != want && !epi_short) {
    throw ValidationError("layout " + std::string(to_string(layout)) + " needs " +
                          std::to_string(want) + " segments, got " +
                          std::to_string(segments.size()));
  }
  if (layout == Layout::kEpidemic && segments.size() == 3 &&
      !(segments[0].kernel == segments[2].kernel)) {
    throw ValidationError("epidemic segments 1 and 3 must share a kernel");
  }
  const auto given = std::count_if(segments.begin(), segments.end(),
                                   [](const Segment& s) { return s.length.has_value(); });
  if (given != 0 && static_cast<std::size_t>(given) != segments.size()) {
    throw ValidationError("segment lengths must be given for all segments or none");
  }
  if (given != 0) {
    if (epi_short) throw ValidationError("explicit epidemic lengths need all 3 segments");
    std::size_t total = 0;
    for (const Segment& s : segments) {
      if (*s.length == 0) throw ValidationError("segment lengths must be positive");
      total += *s.length;
    }
    if (total != n) {
      throw ValidationError("segment lengths sum to " + std::to_string(total) + ", expected n = " +
                            std::to_string(n));
    }
  }
  if (!(t_df > 0.0)) throw ValidationError("t_df must be positive");
  if (!std::isfinite(skew_shape)) throw ValidationError("skew_shape must be finite");
}

ChangePointSet scenario_truth(const Scenario& sc) {
  sc.validate();
  if (sc.segments.front().length) {
    std::vector<std::size_t> pts;
    std::size_t acc = 0;
    for (std::size_t j = 0; j + 1 < sc.segments.size(); ++j) {
      acc += *sc.segments[j].length;
      pts.push_back(acc);
    }
    return ChangePointSet(sc.n, std::move(pts));
  }
  Engine eng = make_engine(sc.seed, kLayoutStream);
  switch (sc.layout) {
    case Layout::kNone: return ChangePointSet(sc.n, {});
    case Layout::kAmoc: return ChangePointSet(sc.n, {sc.n / 2});
    case Layout::kEpidemic: return ChangePointSet(sc.n, spaced_points(sc.n, 2, eng));
    case Layout::kFiveAscending:
    case Layout::kFiveAlternating: return ChangePointSet(sc.n, spaced_points(sc.n, 5, eng));
  }
  return ChangePointSet(sc.n, {});
}

std::pair<FunctionalSample, ChangePointSet> build_scenario(const Scenario& sc) {
  ChangePointSet truth = scenario_truth(sc);
  const std::vector<KernelSpec> kernels = resolved_kernels(sc);
  const Grid grid = Grid::line(sc.grid_points);
  const auto bounds = truth.boundaries();
  FunctionalSample out{grid, Matrix(sc.n, grid.total_points()), {}};
  for (std::size_t j = 0; j + 1 < bounds.size(); ++j) {
    const std::size_t len = bounds[j + 1] - bounds[j];
    const std::uint64_t seed = derive_seed(sc.seed, kSegmentStream + j);
    FunctionalSample part;
    switch (sc.distribution) {
      case Distribution::kGauss: part = gp_sample(kernels[j], grid, len, seed); break;
      case Distribution::kT3: part = t3_sample(kernels[j], grid, len, seed, sc.t_df); break;
      case Distribution::kSkewGauss:
        part = skew_gauss_sample(kernels[j], grid, len, sc.skew_shape, seed);
        break;
    }
    std::copy(part.values.data().begin(), part.values.data().end(),
              out.values.data().begin() +
                  static_cast<std::ptrdiff_t>(bounds[j] * grid.total_points()));
  }
  return {std::move(out), std::move(truth)};
}

Scenario scenario_from_json(const std::string& text) {
  using nlohmann::json;
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ValidationError(std::string("malformed scenario JSON: ") + e.what());
  }
  try {
    Scenario sc;
    sc.n = j.at("n").get<std::size_t>();
    sc.grid_points = j.value("grid_points", sc.grid_points);
    const auto dist = j.value("distribution", std::string("gauss"));
    const auto d = parse_distribution(dist);
    if (!d) throw ValidationError("unknown distribution '" + dist + "' (gauss, t3, skew-gauss)");
    sc.distribution = *d;
    const auto lay = j.value("layout", std::string("none"));
    const auto l = parse_layout(lay);
    if (!l) {
      throw ValidationError("unknown layout '" + lay +
                            "' (none, amoc, epidemic, five-ascending, five-alternating)");
    }
    sc.layout = *l;
    sc.seed = j.value("seed", std::uint64_t{0});
    sc.skew_shape = j.value("skew_shape", sc.skew_shape);
    sc.t_df = j.value("t_df", sc.t_df);
    for (const json& s : j.at("segments")) {
      Segment seg;
      seg.kernel.alpha = s.value("alpha", seg.kernel.alpha);
      seg.kernel.beta = s.value("beta", seg.kernel.beta);
      if (s.contains("length")) seg.length = s.at("length").get<std::size_t>();
      sc.segments.push_back(seg);
    }
    sc.validate();
    return sc;
  } catch (const json::exception& e) {
    throw ValidationError(std::string("malformed scenario JSON: ") + e.what());
  }
}

std::string scenario_to_json(const Scenario& sc) {
  nlohmann::ordered_json j;
  j["n"] = sc.n;
  j["grid_points"] = sc.grid_points;
  j["distribution"] = to_string(sc.distribution);
  j["layout"] = to_string(sc.layout);
  j["seed"] = sc.seed;
  j["skew_shape"] = sc.skew_shape;
  j["t_df"] = sc.t_df;
  j["segments"] = nlohmann::ordered_json::array();
  for (const Segment& s : sc.segments) {
    nlohmann::ordered_json e;
    e["alpha"] = s.kernel.alpha;
    e["beta"] = s.kernel.beta;
    if (s.length) e["length"] = *s.length;
    j["segments"].push_back(e);
  }
  return j.dump(2);
}

}  // namespace fkwc
