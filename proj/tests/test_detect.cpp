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

#include <chrono>
#include <cmath>
#include <numeric>
#include <random>

#include "fkwc/detect.hpp"
#include "fkwc/simgen.hpp"
#include "pelt_oracle.hpp"

namespace fkwc {
namespace {

RankVector rv(std::vector<std::int64_t> r) { return RankVector{std::move(r)}; }

RankVector identity(std::size_t n) {
  RankVector r{std::vector<std::int64_t>(n)};
  std::iota(r.ranks.begin(), r.ranks.end(), 1);
  return r;
}

RankVector random_permutation(std::size_t n, std::mt19937_64& eng) {
  auto r = identity(n);
  std::shuffle(r.ranks.begin(), r.ranks.end(), eng);
  return r;
}

TEST(Penalty, FormulaAndOverride) {
  PeltConfig c;
  EXPECT_NEAR(c.lambda(207), 8.06, 0.01);
  EXPECT_DOUBLE_EQ(c.lambda(100), 3.74 + 0.3 * 10.0);
  c.lambda_override = 2.5;
  EXPECT_EQ(c.lambda(100), 2.5);
  c.lambda_override = 0.0;
  EXPECT_THROW(c.lambda(100), ValidationError);
  c.lambda_override.reset();
  c.lambda_prime = -1.0;
  EXPECT_THROW(c.lambda(100), ValidationError);
}

TEST(Amoc, MonotoneDriftIsDetected) {
  const auto r = amoc_test(identity(200), NullMode::kAsymptotic, 0, 0);
  EXPECT_EQ(r.estimates.points(), std::vector<std::size_t>{100});
  EXPECT_GT(r.statistic, 3.0);
  EXPECT_LT(*r.p_value, 1e-6);
  const auto small = amoc_test(identity(10), NullMode::kAsymptotic, 0, 0);
  const auto large = amoc_test(identity(400), NullMode::kAsymptotic, 0, 0);
  EXPECT_GT(*small.p_value, *large.p_value);
}

TEST(Amoc, StatisticIsSupOfCusum) {
  std::mt19937_64 eng(1);
  for (int rep = 0; rep < 50; ++rep) {
    const auto r = random_permutation(60, eng);
    const auto z = cusum_process(r).z;
    double best = -1;
    std::size_t arg = 0;
    for (std::size_t i = 0; i + 1 < z.size(); ++i) {
      if (std::abs(z[i]) > best + 1e-12) {
        best = std::abs(z[i]);
        arg = i + 1;
      }
    }
    const auto t = amoc_test(r, NullMode::kAsymptotic, 0, 0);
    EXPECT_NEAR(t.statistic, best, 1e-12);
    EXPECT_EQ(t.estimates.points().front(), arg);
  }
}

TEST(Amoc, Validation) {
  EXPECT_THROW(amoc_test(identity(3), NullMode::kAsymptotic, 0, 0), ValidationError);
  EXPECT_THROW(amoc_test(identity(10), NullMode::kPermutation, 0, 0), ValidationError);
}

TEST(Amoc, PermutationPValuesUniformUnderNull) {
  std::mt19937_64 eng(2);
  double sum = 0.0;
  const int trials = 400;
  for (int t = 0; t < trials; ++t) {
    const auto r = amoc_test(random_permutation(50, eng), NullMode::kPermutation, 99,
                             static_cast<std::uint64_t>(t));
    ASSERT_GE(*r.p_value, 0.01);
    ASSERT_LE(*r.p_value, 1.0);
    sum += *r.p_value;
  }
  // Mean of (1 + U{0..99}) / 100 is 0.505; sd of the average ~0.0145.
  EXPECT_NEAR(sum / trials, 0.505, 0.045);
}

TEST(Amoc, Deterministic) {
  std::mt19937_64 eng(3);
  const auto r = random_permutation(80, eng);
  EXPECT_EQ(amoc_test(r, NullMode::kPermutation, 199, 5),
            amoc_test(r, NullMode::kPermutation, 199, 5));
}

TEST(Epidemic, ScanEqualsBruteForceOnSmallInput) {
  const auto r = identity(4);
  double best = -1e300;
  std::size_t b1 = 0, b2 = 0;
  for (std::size_t r1 = 1; r1 <= 4; ++r1) {
    for (std::size_t r2 = r1 + 1; r2 <= 4; ++r2) {
      const double w = epidemic_statistic(r, r1, r2);
      if (w > best) {
        best = w;
        b1 = r1;
        b2 = r2;
      }
    }
  }
  const auto s = epidemic_scan(r, 1);
  EXPECT_EQ(s.statistic, best);
  EXPECT_EQ(s.r1, b1);
  EXPECT_EQ(s.r2, b2);
}

TEST(Epidemic, ScanEqualsBruteForceRandom) {
  std::mt19937_64 eng(4);
  for (int rep = 0; rep < 200; ++rep) {
    const std::size_t n = 6 + static_cast<std::size_t>(rep % 40);
    const std::size_t gap = 1 + static_cast<std::size_t>(rep % 4);
    const auto r = oracle::planted_ranks(n, 2, rep % 3 == 0, eng);
    double best = -1e300;
    std::size_t b1 = 0, b2 = 0;
    for (std::size_t r1 = 1; r1 <= n; ++r1) {
      for (std::size_t r2 = r1 + gap; r2 <= n; ++r2) {
        const double w = epidemic_statistic(r, r1, r2);
        if (w > best) {
          best = w;
          b1 = r1;
          b2 = r2;
        }
      }
    }
    const auto s = epidemic_scan(r, gap);
    ASSERT_EQ(s.statistic, best);
    ASSERT_EQ(s.r1, b1);
    ASSERT_EQ(s.r2, b2);
  }
}

TEST(Epidemic, PlantedWindowIsBracketed) {
  // n = 30; observations 11..20 hold the top ten ranks.
  RankVector r{std::vector<std::int64_t>(30)};
  std::mt19937_64 eng(5);
  std::vector<std::int64_t> low(20), high(10);
  std::iota(low.begin(), low.end(), 1);
  std::iota(high.begin(), high.end(), 21);
  std::shuffle(low.begin(), low.end(), eng);
  std::shuffle(high.begin(), high.end(), eng);
  for (std::size_t i = 0; i < 10; ++i) r.ranks[i] = low[i];
  for (std::size_t i = 0; i < 10; ++i) r.ranks[10 + i] = high[i];
  for (std::size_t i = 0; i < 10; ++i) r.ranks[20 + i] = low[10 + i];
  const auto t = epidemic_test(r, 2, NullMode::kPermutation, 199, 1);
  EXPECT_EQ(t.estimates.points(), (std::vector<std::size_t>{10, 20}));
  EXPECT_LT(*t.p_value, 0.01);
}

TEST(Epidemic, LeadingWindowDropsZero) {
  const auto r = rv({10, 9, 8, 2, 3, 4, 5, 6, 7, 1});
  const auto t = epidemic_test(r, 2, NullMode::kPermutation, 19, 1);
  EXPECT_EQ(t.estimates.points(), std::vector<std::size_t>{3});
}

TEST(Epidemic, Validation) {
  EXPECT_THROW(epidemic_test(identity(5), 1, NullMode::kPermutation, 9, 0), ValidationError);
  EXPECT_THROW(epidemic_test(identity(10), 0, NullMode::kPermutation, 9, 0), ValidationError);
  EXPECT_THROW(epidemic_test(identity(10), 9, NullMode::kPermutation, 9, 0), ValidationError);
  EXPECT_THROW(epidemic_test(identity(10), 2, NullMode::kPermutation, 0, 0), ValidationError);
}

TEST(Epidemic, PermutationCalibratedSizeUnderNull) {
  std::mt19937_64 eng(6);
  const std::size_t n = 200;
  const auto null = permutation_null(n, ScanKind::kEpidemic, 2, 999, 77);
  int rejections = 0;
  const int trials = 1000;
  for (int t = 0; t < trials; ++t) {
    const auto r = random_permutation(n, eng);
    rejections += null.p_value(epidemic_scan(r, 2).statistic) <= 0.05;
  }
  EXPECT_NEAR(static_cast<double>(rejections) / trials, 0.05, 0.02);
}

TEST(Epidemic, AsymptoticModeRuns) {
  std::mt19937_64 eng(7);
  const auto r = random_permutation(60, eng);
  const auto t = epidemic_test(r, 6, NullMode::kAsymptotic, 200, 3);
  EXPECT_GE(*t.p_value, 0.0);
  EXPECT_LE(*t.p_value, 1.0);
  EXPECT_EQ(t, epidemic_test(r, 6, NullMode::kAsymptotic, 200, 3));
}

TEST(Pelt, PlantedSingleShift) {
  for (std::size_t n : {20u, 100u, 500u}) {
    RankVector r = identity(n);
    std::mt19937_64 eng(n);
    std::shuffle(r.ranks.begin(), r.ranks.begin() + static_cast<std::ptrdiff_t>(n / 2), eng);
    std::shuffle(r.ranks.begin() + static_cast<std::ptrdiff_t>(n / 2), r.ranks.end(), eng);
    EXPECT_EQ(pelt_detect(r, PeltConfig{}).points(), std::vector<std::size_t>{n / 2}) << n;
  }
}

TEST(Pelt, NullPermutationsMostlyEmpty) {
  std::mt19937_64 eng(8);
  int empty = 0;
  const int trials = 200;
  for (int t = 0; t < trials; ++t) empty += pelt_detect(random_permutation(500, eng), {}).empty();
  EXPECT_GE(empty, 0.9 * trials);
}

TEST(Pelt, Validation) {
  PeltConfig c;
  c.min_segment = 3;
  EXPECT_THROW(pelt_detect(identity(5), c), ValidationError);
  EXPECT_NO_THROW(pelt_detect(identity(6), c));
  c.min_segment = 0;
  EXPECT_THROW(pelt_detect(identity(6), c), ValidationError);
}

TEST(Pelt, RespectsMinSegment) {
  std::mt19937_64 eng(9);
  for (int rep = 0; rep < 200; ++rep) {
    PeltConfig c;
    c.min_segment = 1 + static_cast<std::size_t>(rep % 5);
    c.lambda_override = 0.5;
    const auto r = oracle::planted_ranks(60, 4, false, eng);
    const auto b = pelt_detect(r, c).boundaries();
    for (std::size_t s = 0; s + 1 < b.size(); ++s) EXPECT_GE(b[s + 1] - b[s], c.min_segment);
  }
}

TEST(Pelt, MatchesFullEnumeration) {
  std::mt19937_64 eng(10);
  std::uniform_real_distribution<double> lam(0.2, 6.0);
  for (int rep = 0; rep < 600; ++rep) {
    const std::size_t n = 4 + static_cast<std::size_t>(rep % 13);
    PeltConfig c;
    c.min_segment = 1 + static_cast<std::size_t>(rep % 3);
    if (n < 2 * c.min_segment) continue;
    c.lambda_override = lam(eng);
    const auto r = oracle::planted_ranks(n, 3, rep % 4 == 0, eng);
    const auto expect = oracle::enumerate_all(r, *c.lambda_override, c.min_segment);
    ASSERT_EQ(pelt_detect(r, c).points(), expect.points) << "rep " << rep;
  }
}

TEST(Pelt, MatchesUnprunedDynamicProgram) {
  std::mt19937_64 eng(11);
  std::uniform_real_distribution<double> lp(0.0, 0.6);
  for (int rep = 0; rep < 1500; ++rep) {
    const std::size_t n = 4 + static_cast<std::size_t>(rep % 37);
    PeltConfig c;
    c.min_segment = 1 + static_cast<std::size_t>(rep % 3);
    if (n < 2 * c.min_segment) continue;
    c.lambda_prime = lp(eng);
    const auto r = oracle::planted_ranks(n, 3, rep % 5 == 0, eng);
    const auto expect = oracle::optimal_partitioning(r, c.lambda(n), c.min_segment);
    ASSERT_EQ(pelt_detect(r, c).points(), expect.points) << "rep " << rep;
  }
}

TEST(Pelt, ObjectiveIsPenalizedKruskalWallis) {
  std::mt19937_64 eng(12);
  for (int rep = 0; rep < 100; ++rep) {
    const auto r = oracle::planted_ranks(30, 3, false, eng);
    const double lambda = 2.0;
    const auto best = oracle::optimal_partitioning(r, lambda, 1);
    const ChangePointSet cps(30, best.points);
    // Minimized cost + lambda (the -lambda seed) equals -(W + 3(n+1)) + j lambda.
    EXPECT_NEAR(best.value, -(penalized_kw(r, cps, lambda) + 3.0 * 31.0), 1e-9);
  }
}

TEST(Pelt, LargeInputRunsFastWithChanges) {
  // Pruning keeps the candidate set small when changes keep arriving.
  std::mt19937_64 eng(13);
  const std::size_t n = 200000;
  std::vector<double> scores(n);
  std::normal_distribution<double> z;
  for (std::size_t i = 0; i < n; ++i) scores[i] = -std::abs(z(eng) * ((i / 2000) % 2 ? 3.0 : 1.0));
  const auto r = ranks_from_scores(scores);
  const auto t0 = std::chrono::steady_clock::now();
  const auto cps = pelt_detect(r, {});
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  EXPECT_GE(cps.count(), 90u);
  EXPECT_LT(secs, 30.0);
}

TEST(Pipeline, DeterministicAndRecordsSeed) {
  Scenario sc;
  sc.n = 60;
  sc.grid_points = 30;
  sc.layout = Layout::kAmoc;
  sc.segments = {{std::nullopt, {0.2, 1.0}}, {std::nullopt, {0.2, 3.0}}};
  sc.seed = 4;
  const auto [sample, truth] = build_scenario(sc);
  PipelineOptions o;
  o.reps = 99;
  o.seed = 1234;
  o.depth.projections = 10;
  for (auto det : {Detector::kAmoc, Detector::kEpidemic, Detector::kPelt}) {
    const auto a = detect_pipeline(sample, DepthMethod::kRpDeriv, det, o);
    EXPECT_EQ(a, detect_pipeline(sample, DepthMethod::kRpDeriv, det, o));
    EXPECT_EQ(a.seed, 1234u);
    EXPECT_EQ(a.depth, DepthMethod::kRpDeriv);
    EXPECT_EQ(a.p_value.has_value(), det != Detector::kPelt);
  }
  o.center = true;
  EXPECT_NO_THROW(detect_pipeline(sample, DepthMethod::kMfhd, Detector::kAmoc, o));
}

TEST(Names, RoundTrip) {
  for (auto d : {Detector::kAmoc, Detector::kEpidemic, Detector::kPelt}) {
    EXPECT_EQ(parse_detector(to_string(d)), d);
  }
  for (auto m : {NullMode::kAsymptotic, NullMode::kPermutation}) {
    EXPECT_EQ(parse_null_mode(to_string(m)), m);
  }
  EXPECT_FALSE(parse_detector("binseg"));
}

}  // namespace
}  // namespace fkwc
