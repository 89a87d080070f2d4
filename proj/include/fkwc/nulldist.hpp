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
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "fkwc/rankstat.hpp"

namespace fkwc {

/// P(sup_t |B(t)| > x) for a standard Brownian bridge.
double kolmogorov_survival(double x);
inline double kolmogorov_cdf(double x) { return 1.0 - kolmogorov_survival(x); }
/// Smallest x with kolmogorov_survival(x) <= alpha (bisection to 1e-12).
double kolmogorov_critical_value(double alpha);

struct AmocScan {
  double statistic = 0.0;  // sup_{1 <= i < n} |Z_n(i/n)|
  std::size_t estimate = 0;  // first index attaining the sup
};

struct EpidemicScan {
  double statistic = 0.0;
  std::size_t r1 = 0;  // window is r1..r2-1, 1-based
  std::size_t r2 = 0;
};

AmocScan amoc_scan(const RankVector& ranks);

/// Maximizes the epidemic statistic over 1 <= r1 < r2 <= n with r2 - r1 >= min_gap.
/// Ties resolve to the lexicographically smallest (r1, r2).
EpidemicScan epidemic_scan(const RankVector& ranks, std::size_t min_gap);

/// Sorted Monte Carlo draws of a null statistic.
class NullSample {
 public:
  NullSample() = default;
  explicit NullSample(std::vector<double> draws);

  std::size_t size() const { return draws_.size(); }
  const std::vector<double>& draws() const { return draws_; }

  /// (1 + #{draw >= observed}) / (size + 1). Draws within a relative 1e-12
  /// of the observed value count as ties.
  double p_value(double observed) const;

  /// Empirical (1 - alpha) quantile: the smallest draw d with
  /// #{draws > d} / size <= alpha.
  double upper_quantile(double alpha) const;

 private:
  std::vector<double> draws_;
};

enum class ScanKind { kAmoc, kEpidemic };

/// Statistic values on `reps` uniform random permutations of `ranks`. Replicate
/// r uses its own engine seeded from (seed, r), so the draws do not depend on
/// the thread count.
NullSample permutation_null(const RankVector& ranks, ScanKind kind, std::size_t min_gap,
                            std::size_t reps, std::uint64_t seed);

/// Permutation null of 1..n; shared by every dataset of length n.
NullSample permutation_null(std::size_t n, ScanKind kind, std::size_t min_gap, std::size_t reps,
                            std::uint64_t seed);

/// Monte Carlo law of the epidemic limit: sup of (B(t2)-B(t1))^2 / ((t2-t1)(1-t2+t1))
/// over the same discrete windows and min_gap as the data scan, B a Brownian
/// bridge sampled on an n-point grid.
NullSample bridge_epidemic_null(std::size_t n, std::size_t min_gap, std::size_t reps,
                                std::uint64_t seed);

/// One cached critical value of the epidemic statistic.
struct CriticalValueEntry {
  std::size_t n = 0;
  std::size_t min_gap = 0;
  double alpha = 0.05;
  double quantile = 0.0;
  std::size_t reps = 0;
  std::uint64_t seed = 0;
  std::string mode = "permutation";  // or "asymptotic"
};

/// JSON-backed cache of epidemic critical values, keyed by all fields but quantile.
class CriticalValueTable {
 public:
  static CriticalValueTable load(const std::filesystem::path& path);  // empty if missing
  void save(const std::filesystem::path& path) const;

  std::optional<double> find(std::size_t n, std::size_t min_gap, double alpha, std::size_t reps,
                             std::uint64_t seed, const std::string& mode) const;

  /// Returns the cached value or computes, stores and returns it.
  double get_or_compute(std::size_t n, std::size_t min_gap, double alpha, std::size_t reps,
                        std::uint64_t seed, const std::string& mode);

  const std::vector<CriticalValueEntry>& entries() const { return entries_; }

 private:
  std::vector<CriticalValueEntry> entries_;
};

}  // namespace fkwc
