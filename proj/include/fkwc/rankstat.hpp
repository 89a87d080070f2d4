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
#include <span>
#include <vector>

#include "fkwc/core.hpp"
#include "fkwc/depth.hpp"

namespace fkwc {

/// rank_i = #{j : score_j <= score_i}. Ties share the largest count.
struct RankVector {
  std::vector<std::int64_t> ranks;
  std::size_t size() const { return ranks.size(); }
};

/// z[i-1] = Z_n(i/n) for i = 1..n: the standardized Wilcoxon rank CUSUM.
struct CusumProcess {
  std::size_t n = 0;
  std::vector<double> z;
};

RankVector ranks_from_scores(std::span<const double> scores);
inline RankVector ranks_from_scores(const DepthScores& scores) {
  return ranks_from_scores(scores.values);
}

/// Cumulative rank sums: sum(a, b) is the rank total of observations a+1..b.
class RankPrefix {
 public:
  explicit RankPrefix(const RankVector& ranks);
  std::size_t size() const { return prefix_.size() - 1; }
  std::int64_t sum(std::size_t a, std::size_t b) const { return prefix_[b] - prefix_[a]; }
  std::int64_t total() const { return prefix_.back(); }

 private:
  std::vector<std::int64_t> prefix_;
};

/// Kruskal-Wallis objective of the segmentation `cps`:
/// 12/(n(n+1)) * sum_i len_i * mean_i^2 - 3(n+1).
double kw_statistic(const RankVector& ranks, const ChangePointSet& cps);

CusumProcess cusum_process(const RankVector& ranks);

/// Epidemic statistic with the window r1..r2-1 (1-based, 1 <= r1 < r2 <= n)
/// against the pooled outside observations.
double epidemic_statistic(const RankVector& ranks, std::size_t r1, std::size_t r2);

/// Same quantity through the centered window-sum form
/// q_n / ((L/n)(1 - L/n)) * (n^{-1/2} sum_window (R - (n+1)/2) / sigma)^2,
/// sigma^2 = (n^2-1)/12, q_n = (n^2-1)/(n(n+1)). Equal to epidemic_statistic
/// when the ranks are a permutation of 1..n.
double epidemic_statistic_centered(const RankVector& ranks, std::size_t r1, std::size_t r2);

namespace detail {

// Shared by epidemic_statistic and the scan so both evaluate identically.
inline double epidemic_from_sums(double n, double inside, double outside, double len) {
  return 12.0 / (n * (n + 1.0)) * (outside * outside / (n - len) + inside * inside / len) -
         3.0 * (n + 1.0);
}

}  // namespace detail

/// Single split maximizing the Kruskal-Wallis objective (first maximizer).
/// Differs from the CUSUM estimate by a (t(1-t))^{-1} weighting; reported as a
/// diagnostic next to the CUSUM-based AMOC estimate.
std::size_t kw_amoc_argmax(const RankVector& ranks);

}  // namespace fkwc
