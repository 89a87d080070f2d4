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

#include <gtest/gtest.h>
#include <omp.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "fkwc/depth.hpp"
#include "fkwc/rankstat.hpp"
#include "fkwc/reference.hpp"

namespace fkwc {
namespace {

FunctionalSample random_sample(std::size_t n, const Grid& g, std::uint64_t seed) {
  std::mt19937_64 eng(seed);
  std::normal_distribution<double> z;
  FunctionalSample s{g, Matrix(n, g.total_points()), {}};
  for (double& v : s.values.data()) v = z(eng);
  return s;
}

FunctionalSample integer_sample(std::size_t n, const Grid& g, std::uint64_t seed,
                                bool gradients) {
  std::mt19937_64 eng(seed);
  std::uniform_int_distribution<int> u(-20, 20);
  FunctionalSample s{g, Matrix(n, g.total_points()), {}};
  for (double& v : s.values.data()) v = u(eng);
  if (gradients) {
    for (std::size_t a = 0; a < g.dims(); ++a) {
      Matrix m(n, g.total_points());
      for (double& v : m.data()) v = u(eng);
      s.gradients.push_back(std::move(m));
    }
  }
  return s;
}

TEST(Directions, UnitNormAndDeterministic) {
  for (const Grid& g : {Grid::line(100), Grid({12, 14})}) {
    const auto d = draw_directions(g, 30, 21, 77);
    EXPECT_EQ(d.count(), 30u);
    for (std::size_t m = 0; m < d.count(); ++m) {
      EXPECT_NEAR(l2_norm_sq(d.directions.row(m), g), 1.0, 1e-10);
    }
    EXPECT_EQ(d.directions, draw_directions(g, 30, 21, 77).directions);
    EXPECT_NE(d.directions, draw_directions(g, 30, 21, 78).directions);
  }
}

TEST(Directions, SingleConstantBasisGivesOne) {
  const auto d = draw_directions(Grid::line(9), 1, 1, 5);
  for (double v : d.directions.data()) EXPECT_NEAR(v, 1.0, 1e-15);
}

TEST(Directions, BasisOrthonormalAndFrequencyLimit) {
  const Grid g = Grid::line(64);
  const Matrix b = fourier_basis(g, 21);
  for (std::size_t i = 0; i < 21; ++i) {
    for (std::size_t j = 0; j < 21; ++j) {
      EXPECT_NEAR(inner_product(b.row(i), b.row(j), g), i == j ? 1.0 : 0.0, 1e-10);
    }
  }
  // Basis 21 needs frequency 10, which a 20-point axis cannot carry.
  EXPECT_THROW(fourier_basis(Grid::line(20), 21), ValidationError);
  EXPECT_NO_THROW(fourier_basis(Grid::line(21), 21));
  EXPECT_THROW(draw_directions(Grid::line(21), 0, 3, 1), ValidationError);
  EXPECT_THROW(draw_directions(Grid::line(21), 3, 0, 1), ValidationError);
}

TEST(Directions, GradedTensorOrder) {
  // d = 2: level 0 {(0,0)}, level 1 {(0,1),(1,0),(1,1)} then level 2 starts.
  const Grid g({9, 9});
  const Matrix b = fourier_basis(g, 5);
  const std::size_t p = 4 * 9 + 2;  // s = 0.5, t = 0.25
  const double s2 = std::sqrt(2.0);
  EXPECT_NEAR(b(0, p), 1.0, 1e-14);
  EXPECT_NEAR(b(1, p), s2 * std::sin(2 * M_PI * 0.25), 1e-14);
  EXPECT_NEAR(b(2, p), s2 * std::sin(2 * M_PI * 0.5), 1e-14);
  EXPECT_NEAR(b(3, p), 2.0 * std::sin(2 * M_PI * 0.5) * std::sin(2 * M_PI * 0.25), 1e-14);
  EXPECT_NEAR(b(4, p), s2 * std::cos(2 * M_PI * 0.25), 1e-14);
}

TEST(RpDepth, SinglePointScoresZero) {
  const Grid g = Grid::line(30);
  const auto s = random_sample(1, g, 1);
  const auto d = draw_directions(g, 10, 5, 1);
  EXPECT_EQ(rp_depth(s, d, false).values, std::vector<double>{0.0});
}

TEST(RpDepth, TwoPointsPerProjectionQuarterAndZero) {
  const Grid g = Grid::line(30);
  const auto s = random_sample(2, g, 2);
  const auto all = draw_directions(g, 20, 9, 3);
  for (std::size_t m = 0; m < all.count(); ++m) {
    DirectionSet one{g, 9, 3, Matrix(1, g.total_points())};
    std::copy(all.directions.row(m).begin(), all.directions.row(m).end(),
              one.directions.row(0).begin());
    auto v = rp_depth(s, one, false).values;
    std::sort(v.begin(), v.end());
    EXPECT_EQ(v, (std::vector<double>{0.0, 0.25}));
  }
}

TEST(RpDepth, IdenticalCopiesScoreEqually) {
  const Grid g = Grid::line(25);
  auto s = random_sample(1, g, 3);
  FunctionalSample copies{g, Matrix(6, 25), {}};
  for (std::size_t i = 0; i < 6; ++i) {
    std::copy(s.values.row(0).begin(), s.values.row(0).end(), copies.values.row(i).begin());
  }
  const auto d = draw_directions(g, 15, 7, 4);
  for (bool deriv : {false, true}) {
    const auto src = deriv ? finite_diff_gradient(copies) : copies;
    const auto v = rp_depth(src, d, deriv).values;
    for (double x : v) EXPECT_EQ(x, v[0]);
  }
}

TEST(RpDepth, ConstantDirectionEqualsIntegralDepth) {
  const Grid g = Grid::line(40);
  const auto s = random_sample(35, g, 5);
  DirectionSet c{g, 1, 0, Matrix(1, 40, 1.0)};
  const auto v = rp_depth(s, c, false).values;
  std::vector<double> integrals(35);
  const std::vector<double> one(40, 1.0);
  for (std::size_t i = 0; i < 35; ++i) integrals[i] = inner_product(s.values.row(i), one, g);
  for (std::size_t i = 0; i < 35; ++i) {
    double le = 0;
    for (double y : integrals) le += y <= integrals[i];
    const double f = le / 35.0;
    EXPECT_DOUBLE_EQ(v[i], f * (1.0 - f));
  }
}

TEST(RpDepth, MissingGradientsOrEmptySampleThrow) {
  const Grid g = Grid::line(10);
  const auto d = draw_directions(g, 3, 3, 1);
  EXPECT_THROW(rp_depth(random_sample(4, g, 1), d, true), ValidationError);
  EXPECT_THROW(rp_depth(FunctionalSample{g, Matrix(0, 10), {}}, d, false), ValidationError);
  EXPECT_THROW(mfhd_depth(random_sample(4, g, 1), true), ValidationError);
  EXPECT_THROW(norm_scores(random_sample(4, g, 1), true), ValidationError);
}

TEST(MfhdDepth, IdenticalObservationsScoreOne) {
  const Grid g = Grid::line(12);
  FunctionalSample s{g, Matrix(5, 12, 0.75), {}};
  for (double v : mfhd_depth(s, false).values) EXPECT_DOUBLE_EQ(v, 1.0);
  for (double v : mfhd_depth(finite_diff_gradient(s), true).values) EXPECT_DOUBLE_EQ(v, 1.0);
}

TEST(MfhdDepth, ThreeConstants) {
  const Grid g = Grid::line(17);
  FunctionalSample s{g, Matrix(3, 17), {}};
  for (std::size_t i = 0; i < 3; ++i)
    for (double& v : s.values.row(i)) v = static_cast<double>(i + 1);
  const auto v = mfhd_depth(s, false).values;
  EXPECT_NEAR(v[0], 1.0 / 3.0, 1e-15);
  EXPECT_NEAR(v[1], 2.0 / 3.0, 1e-15);
  EXPECT_NEAR(v[2], 1.0 / 3.0, 1e-15);
}

TEST(MfhdDepth, AffineInvariantPointwise) {
  const Grid g = Grid::line(50);
  const auto s = integer_sample(40, g, 6, false);
  FunctionalSample t = s;
  for (std::size_t p = 0; p < 50; ++p) {
    const double a = 1.0 + static_cast<double>(p % 7);
    const double b = static_cast<double>(p % 5) - 2.0;
    for (std::size_t i = 0; i < 40; ++i) t.values(i, p) = a * s.values(i, p) + b;
  }
  EXPECT_EQ(mfhd_depth(s, false).values, mfhd_depth(t, false).values);
}

TEST(MfhdDepth, AffineInvariantWithDerivatives) {
  // Pointwise invertible integer maps of the (value, slope) tuple, with
  // translations; integer data keeps every predicate exact.
  const Grid g = Grid::line(30);
  const auto s = integer_sample(35, g, 7, true);
  FunctionalSample t = s;
  const int maps[3][4] = {{2, 1, 1, 1}, {-1, 0, 3, 2}, {0, 1, -1, 0}};
  for (std::size_t p = 0; p < 30; ++p) {
    const auto& m = maps[p % 3];
    for (std::size_t i = 0; i < 35; ++i) {
      const double x = s.values(i, p), y = s.gradients[0](i, p);
      t.values(i, p) = m[0] * x + m[1] * y + 3.0;
      t.gradients[0](i, p) = m[2] * x + m[3] * y - static_cast<double>(p);
    }
  }
  EXPECT_EQ(mfhd_depth(s, true).values, mfhd_depth(t, true).values);
}

TEST(MfhdDepth, ScaleInvariantOnContinuousData) {
  const Grid g = Grid::line(40);
  const auto s = random_sample(30, g, 8);
  FunctionalSample t = s;
  for (double& v : t.values.data()) v *= 4.0;
  EXPECT_EQ(mfhd_depth(s, false).values, mfhd_depth(t, false).values);
  EXPECT_EQ(mfhd_depth(finite_diff_gradient(s), true).values,
            mfhd_depth(finite_diff_gradient(t), true).values);
}

TEST(NormScores, Examples) {
  const Grid g = Grid::line(11);
  FunctionalSample s{g, Matrix(3, 11), {}};
  for (double& v : s.values.row(1)) v = 1.0;
  for (double& v : s.values.row(2)) v = 2.0;
  const auto v = norm_scores(s, false).values;
  EXPECT_EQ(v[0], 0.0);
  EXPECT_NEAR(v[1], -1.0, 1e-14);
  EXPECT_NEAR(v[2], -4.0, 1e-14);
  const auto r = ranks_from_scores(v);
  EXPECT_EQ(r.ranks, (std::vector<std::int64_t>{3, 2, 1}));
  const auto withd = norm_scores(finite_diff_gradient(s), true).values;
  EXPECT_NEAR(withd[2], -4.0, 1e-14);
}

TEST(NormScores, PermutationAndScaling) {
  const Grid g = Grid::line(20);
  const auto s = random_sample(25, g, 9);
  FunctionalSample rev = s;
  FunctionalSample scaled = s;
  for (std::size_t i = 0; i < 25; ++i) {
    std::copy(s.values.row(24 - i).begin(), s.values.row(24 - i).end(), rev.values.row(i).begin());
  }
  for (double& v : scaled.values.data()) v *= 3.0;
  const auto a = norm_scores(s, false).values;
  const auto b = norm_scores(rev, false).values;
  for (std::size_t i = 0; i < 25; ++i) EXPECT_EQ(a[i], b[24 - i]);
  EXPECT_EQ(ranks_from_scores(a).ranks, ranks_from_scores(norm_scores(scaled, false)).ranks);
}

TEST(AllDepths, RangeBoundsAndDeterminism) {
  for (const Grid& g : {Grid::line(30), Grid({6, 7})}) {
    const auto s = random_sample(40, g, 10);
    DepthOptions o;
    o.projections = 12;
    o.basis_size = 5;
    o.tukey_directions = 100;
    o.seed = 99;
    for (auto m : {DepthMethod::kRp, DepthMethod::kRpDeriv, DepthMethod::kMfhd,
                   DepthMethod::kMfhdDeriv, DepthMethod::kNorm, DepthMethod::kNormDeriv}) {
      const auto d = compute_depth(s, m, o);
      EXPECT_EQ(d.method, m);
      EXPECT_EQ(d.values, compute_depth(s, m, o).values) << to_string(m);
      for (double v : d.values) {
        if (m == DepthMethod::kRp) {
          EXPECT_GE(v, 0.0);
          EXPECT_LE(v, 0.25);
        } else if (m == DepthMethod::kNorm || m == DepthMethod::kNormDeriv) {
          EXPECT_LE(v, 0.0);
        } else {
          EXPECT_GE(v, 0.0);
          EXPECT_LE(v, 0.5 + 1e-12);  // distinct continuous points
        }
      }
    }
  }
}

TEST(AllDepths, MethodNamesRoundTrip) {
  for (auto m : {DepthMethod::kRp, DepthMethod::kRpDeriv, DepthMethod::kMfhd,
                 DepthMethod::kMfhdDeriv, DepthMethod::kNorm, DepthMethod::kNormDeriv}) {
    EXPECT_EQ(parse_depth_method(to_string(m)), m);
  }
  EXPECT_FALSE(parse_depth_method("simplicial"));
}

class ParallelVsSerial : public ::testing::TestWithParam<int> {};

TEST_P(ParallelVsSerial, KernelsMatchReferenceExactly) {
  omp_set_num_threads(GetParam());
  for (const Grid& g : {Grid::line(150), Grid({5, 6})}) {
    const auto s = finite_diff_gradient(random_sample(45, g, 11));
    const auto dirs = draw_directions(g, 17, 5, 12);
    for (bool deriv : {false, true}) {
      EXPECT_EQ(rp_depth(s, dirs, deriv, 80, 13).values,
                reference::rp_depth_serial(s, dirs, deriv, 80, 13).values);
      // Block-ordered reduction versus a running sum: equal up to rounding.
      const auto par = mfhd_depth(s, deriv, 80, 13).values;
      const auto ser = reference::mfhd_depth_serial(s, deriv, 80, 13).values;
      for (std::size_t i = 0; i < par.size(); ++i) EXPECT_NEAR(par[i], ser[i], 1e-12);
    }
  }
  omp_set_num_threads(omp_get_num_procs());
}

TEST_P(ParallelVsSerial, ResultsIndependentOfThreadCount) {
  const Grid g = Grid::line(200);
  const auto s = finite_diff_gradient(random_sample(60, g, 14));
  const auto dirs = draw_directions(g, 23, 9, 15);
  omp_set_num_threads(1);
  const auto rp1 = rp_depth(s, dirs, true, 80, 16).values;
  const auto mf1 = mfhd_depth(s, true, 80, 16).values;
  omp_set_num_threads(GetParam());
  EXPECT_EQ(rp1, rp_depth(s, dirs, true, 80, 16).values);
  EXPECT_EQ(mf1, mfhd_depth(s, true, 80, 16).values);
  omp_set_num_threads(omp_get_num_procs());
}

INSTANTIATE_TEST_SUITE_P(Threads, ParallelVsSerial, ::testing::Values(1, 3, 8));

}  // namespace
}  // namespace fkwc
