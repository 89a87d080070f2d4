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

#include "fkwc/core.hpp"
#include "fkwc/depth.hpp"
#include "fkwc/nulldist.hpp"
#include "fkwc/rankstat.hpp"

namespace fkwc {

enum class NullMode { kAsymptotic, kPermutation };
enum class Detector { kAmoc, kEpidemic, kPelt };

std::string_view to_string(NullMode m);
std::string_view to_string(Detector d);
std::optional<NullMode> parse_null_mode(std::string_view s);
std::optional<Detector> parse_detector(std::string_view s);

struct TestResult {
  Detector method = Detector::kAmoc;
  std::optional<DepthMethod> depth;  // set by detect_pipeline
  double statistic = 0.0;
  std::optional<double> p_value;  // absent for PELT
  ChangePointSet estimates;
  NullMode null_mode = NullMode::kPermutation;
  std::size_t reps = 0;
  std::uint64_t seed = 0;
  std::optional<std::size_t> kw_estimate;  // AMOC: weighted Kruskal-Wallis argmax
  std::optional<double> lambda;            // PELT penalty actually used

  friend bool operator==(const TestResult&, const TestResult&) = default;
};

/// Penalty lambda_n = 3.74 + lambda_prime * sqrt(n) unless overridden.
struct PeltConfig {
  double lambda_prime = 0.3;
  std::optional<double> lambda_override;
  std::size_t min_segment = 2;

  double lambda(std::size_t n) const;
};

/// At-most-one-change test: sup |Z_n(i/n)| over 1 <= i < n, estimate is the
/// first maximizer. Permutation mode shuffles the observed ranks `reps` times.
TestResult amoc_test(const RankVector& ranks, NullMode mode, std::size_t reps,
                     std::uint64_t seed);

/// Epidemic test: max of the epidemic statistic over windows with
/// r2 - r1 >= min_gap. The estimate {r1 - 1, r2 - 1} drops a leading 0.
/// Asymptotic mode simulates the bridge limit with `reps` paths.
TestResult epidemic_test(const RankVector& ranks, std::size_t min_gap, NullMode mode,
                         std::size_t reps, std::uint64_t seed);

/// Segment cost -12/(n(n+1)) * sum^2 / len; minimizing the summed costs plus
/// lambda per change-point maximizes W(r) - j * lambda.
inline double pelt_segment_cost(double sum, double len, double scale) {
  return -(scale * (sum * sum / len));
}

/// Penalized Kruskal-Wallis segmentation by PELT (pruning constant 0).
/// Ties prefer fewer change-points, then the smaller last change-point.
ChangePointSet pelt_detect(const RankVector& ranks, const PeltConfig& config);

/// W(cps) - |cps| * lambda.
double penalized_kw(const RankVector& ranks, const ChangePointSet& cps, double lambda);

struct PipelineOptions {
  DepthOptions depth;
  NullMode null_mode = NullMode::kPermutation;
  std::size_t reps = 999;
  std::size_t min_gap = 2;
  PeltConfig pelt;
  bool center = false;
  std::uint64_t seed = 0;  // master seed; depth and null streams derive from it
};

/// center (optional) -> gradients (if needed) -> depth -> ranks -> detector.
TestResult detect_pipeline(const FunctionalSample& sample, DepthMethod depth, Detector detector,
                           const PipelineOptions& options);

/// Depth scores and ranks produced by the first pipeline stages.
struct RankedSample {
  DepthScores scores;
  RankVector ranks;
};
RankedSample rank_sample(const FunctionalSample& sample, DepthMethod depth,
                         const PipelineOptions& options);

}  // namespace fkwc
