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

#include "fkwc/detect.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>
#include <vector>

#include "fkwc/rng.hpp"

namespace fkwc {

std::string_view to_string(NullMode m) {
  return m == NullMode::kAsymptotic ? "asymptotic" : "permutation";
}

std::string_view to_string(Detector d) {
  switch (d) {
    case Detector::kAmoc: return "amoc";
    case Detector::kEpidemic: return "epidemic";
    case Detector::kPelt: return "pelt";
  }
  return "?";
}

std::optional<NullMode> parse_null_mode(std::string_view s) {
  if (s == "asymptotic") return NullMode::kAsymptotic;
  if (s == "permutation") return NullMode::kPermutation;
  return std::nullopt;
}

std::optional<Detector> parse_detector(std::string_view s) {
  for (auto d : {Detector::kAmoc, Detector::kEpidemic, Detector::kPelt}) {
    if (to_string(d) == s) return d;
  }
  return std::nullopt;
}

double PeltConfig::lambda(std::size_t n) const {
  const double value =
      lambda_override ? *lambda_override : 3.74 + lambda_prime * std::sqrt(static_cast<double>(n));
  if (!(value > 0.0)) throw ValidationError("PELT penalty must be positive");
  return value;
}

TestResult amoc_test(const RankVector& ranks, NullMode mode, std::size_t reps,
                     std::uint64_t seed) {
  const std::size_t n = ranks.size();
  if (n < 4) throw ValidationError("AMOC test needs n >= 4");
  const AmocScan scan = amoc_scan(ranks);
  TestResult r;
  r.method = Detector::kAmoc;
  r.statistic = scan.statistic;
  r.estimates = ChangePointSet(n, {scan.estimate});
  r.null_mode = mode;
  r.seed = seed;
  r.kw_estimate = kw_amoc_argmax(ranks);
  if (mode == NullMode::kAsymptotic) {
    r.p_value = kolmogorov_survival(scan.statistic);
  } else {
    if (reps < 1) throw ValidationError("permutation mode needs reps >= 1");
    r.reps = reps;
    r.p_value = permutation_null(ranks, ScanKind::kAmoc, 0, reps, seed).p_value(scan.statistic);
  }
  return r;
}

TestResult epidemic_test(const RankVector& ranks, std::size_t min_gap, NullMode mode,
                         std::size_t reps, std::uint64_t seed) {
  const std::size_t n = ranks.size();
  if (n < 6) throw ValidationError("epidemic test needs n >= 6");
  if (min_gap < 1 || min_gap > n - 2) throw ValidationError("min_gap must lie in [1, n-2]");
  if (reps < 1) throw ValidationError("epidemic test needs reps >= 1");
  const EpidemicScan scan = epidemic_scan(ranks, min_gap);
  TestResult r;
  r.method = Detector::kEpidemic;
  r.statistic = scan.statistic;
  std::vector<std::size_t> pts;
  if (scan.r1 > 1) pts.push_back(scan.r1 - 1);
  pts.push_back(scan.r2 - 1);
  r.estimates = ChangePointSet(n, std::move(pts));
  r.null_mode = mode;
  r.reps = reps;
  r.seed = seed;
  const NullSample null = mode == NullMode::kPermutation
                              ? permutation_null(ranks, ScanKind::kEpidemic, min_gap, reps, seed)
                              : bridge_epidemic_null(n, min_gap, reps, seed);
  r.p_value = null.p_value(scan.statistic);
  return r;
}

ChangePointSet pelt_detect(const RankVector& ranks, const PeltConfig& config) {
  const std::size_t n = ranks.size();
  const std::size_t min_seg = config.min_segment;
  if (min_seg < 1) throw ValidationError("min_segment must be at least 1");
  if (n < 2 * min_seg) throw ValidationError("PELT needs n >= 2 * min_segment");
  const double lambda = config.lambda(n);
  const auto nd = static_cast<double>(n);
  const double scale = 12.0 / (nd * (nd + 1.0));

  std::vector<double> prefix(n + 1, 0.0);
  {
    std::int64_t acc = 0;
    for (std::size_t i = 0; i < n; ++i) {
      acc += ranks.ranks[i];
      prefix[i + 1] = static_cast<double>(acc);
    }
  }
  auto cost = [&](std::size_t s, std::size_t t) {
    return pelt_segment_cost(prefix[t] - prefix[s], static_cast<double>(t - s), scale);
  };

  constexpr double kInf = std::numeric_limits<double>::infinity();
  constexpr std::size_t kNever = std::numeric_limits<std::size_t>::max();
  std::vector<double> best(n + 1, kInf);
  std::vector<std::int64_t> changes(n + 1, 0);
  std::vector<std::size_t> last(n + 1, 0);
  best[0] = -lambda;
  changes[0] = -1;

  // Functional pruning. The segment cost is scale * min_mu sum_i (mu^2 - 2 mu r_i),
  // attained at the segment mean, so a candidate s can be the optimal last
  // change at T only if its quadratic in mu is lowest among all candidates at
  // the mean of (s, T]. Each candidate keeps the set of means where it can still
  // be lowest: a new candidate starts with the means no older candidate already
  // covers, and every candidate loses the means where the newest one beats it.
  // Empty sets are dropped; an empty quadratic sublevel set is the plain PELT
  // rule, so this prunes at least as much. Sets are widened by mu_eps so near
  // ties survive, and the surviving candidates are compared exactly.
  const auto [rmin, rmax] = std::minmax_element(ranks.ranks.begin(), ranks.ranks.end());
  const double mu_eps = 1e-9 * (1.0 + nd);
  const double dom_lo = static_cast<double>(*rmin) - mu_eps;
  const double dom_hi = static_cast<double>(*rmax) + mu_eps;
  using Interval = std::pair<double, double>;
  struct Candidate {
    std::size_t s;
    std::size_t drop_at;  // first t at which s may no longer end a segment's prefix
    std::size_t first;    // its mean intervals are pool[first, first + count)
    std::size_t count;
  };
  std::vector<Candidate> cands{{0, kNever, 0, 1}};
  std::vector<Interval> pool{{dom_lo, dom_hi}}, next_pool, covered;

  for (std::size_t t = min_seg; t <= n; ++t) {
    std::erase_if(cands, [t](const Candidate& c) { return c.drop_at <= t; });
    double value = kInf;
    std::int64_t count = 0;
    std::size_t arg = 0;
    for (const Candidate& c : cands) {
      if (t - c.s < min_seg) break;  // candidates are in increasing s
      const double v = best[c.s] + cost(c.s, t) + lambda;
      const std::int64_t k = changes[c.s] + 1;
      if (v < value || (v == value && k < count)) {
        value = v;
        count = k;
        arg = c.s;
      }
    }
    if (value == kInf) continue;
    best[t] = value;
    changes[t] = count;
    last[t] = arg;
    // s keeps the means where len mu^2 - 2 sum mu <= (F(t) - F(s)) / scale. A
    // candidate ruled out at t stays usable until t + min_seg, when (t, T] is
    // admissible.
    const double slack = 1e-9 * (1.0 + std::abs(value));
    next_pool.clear();
    for (Candidate& c : cands) {
      const std::size_t from = c.first, to = c.first + c.count;
      c.first = next_pool.size();
      c.count = 0;
      if (c.drop_at != kNever) continue;
      const double sum = prefix[t] - prefix[c.s];
      const auto len = static_cast<double>(t - c.s);
      const double rhs = (value - best[c.s] + slack) / scale;
      const double disc = sum * sum + len * rhs;
      if (disc >= 0.0) {
        const double q = sum + std::sqrt(disc);  // sum > 0, so no cancellation
        const double hi = q / len + mu_eps;
        const double lo = -rhs / q - mu_eps;
        for (std::size_t k = from; k < to; ++k) {
          const Interval iv{std::max(pool[k].first, lo), std::min(pool[k].second, hi)};
          if (iv.first <= iv.second) next_pool.push_back(iv);
        }
      }
      c.count = next_pool.size() - c.first;
      if (c.count == 0) c.drop_at = t + min_seg;
    }
    covered.assign(next_pool.begin(), next_pool.end());
    std::sort(covered.begin(), covered.end());
    const std::size_t first = next_pool.size();
    double reach = dom_lo;
    for (const Interval& iv : covered) {
      if (iv.first > reach) next_pool.push_back({reach - 2.0 * mu_eps, iv.first + 2.0 * mu_eps});
      reach = std::max(reach, iv.second);
    }
    if (reach < dom_hi) next_pool.push_back({reach - 2.0 * mu_eps, dom_hi});
    if (next_pool.size() > first) cands.push_back({t, kNever, first, next_pool.size() - first});
    pool.swap(next_pool);
  }

  std::vector<std::size_t> pts;
  for (std::size_t t = last[n]; t > 0; t = last[t]) pts.push_back(t);
  std::reverse(pts.begin(), pts.end());
  return ChangePointSet(n, std::move(pts));
}

double penalized_kw(const RankVector& ranks, const ChangePointSet& cps, double lambda) {
  return kw_statistic(ranks, cps) - static_cast<double>(cps.count()) * lambda;
}

RankedSample rank_sample(const FunctionalSample& sample, DepthMethod depth,
                         const PipelineOptions& options) {
  sample.validate();
  DepthOptions dopts = options.depth;
  dopts.seed = options.seed;
  DepthScores scores = options.center ? compute_depth(center_pointwise(sample), depth, dopts)
                                      : compute_depth(sample, depth, dopts);
  RankVector ranks = ranks_from_scores(scores);
  return {std::move(scores), std::move(ranks)};
}

TestResult detect_pipeline(const FunctionalSample& sample, DepthMethod depth, Detector detector,
                           const PipelineOptions& options) {
  const RankedSample ranked = rank_sample(sample, depth, options);
  const std::uint64_t null_seed = derive_seed(options.seed, kNullStream);
  TestResult r;
  switch (detector) {
    case Detector::kAmoc:
      r = amoc_test(ranked.ranks, options.null_mode, options.reps, null_seed);
      break;
    case Detector::kEpidemic:
      r = epidemic_test(ranked.ranks, options.min_gap, options.null_mode, options.reps, null_seed);
      break;
    case Detector::kPelt: {
      r.method = Detector::kPelt;
      r.estimates = pelt_detect(ranked.ranks, options.pelt);
      r.lambda = options.pelt.lambda(sample.size());
      r.statistic = penalized_kw(ranked.ranks, r.estimates, *r.lambda);
      r.null_mode = options.null_mode;
      break;
    }
  }
  r.depth = depth;
  r.seed = options.seed;
  return r;
}

}  // namespace fkwc
