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

#include "fkwc/rankstat.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <utility>
#include <vector>

namespace fkwc {

namespace {

// Order-preserving map from doubles (no NaN) to unsigned keys; -0.0 and 0.0 agree.
std::uint64_t sort_key(double x) {
  const auto bits = std::bit_cast<std::uint64_t>(x + 0.0);
  return bits >> 63 ? ~bits : bits | (std::uint64_t{1} << 63);
}

using KeyedIndex = std::pair<std::uint64_t, std::uint32_t>;

// MSD radix sort by key: one distribution pass on the leading varying bits,
// then each bucket is sorted on its own while it fits in cache.
void radix_sort(KeyedIndex* a, KeyedIndex* tmp, std::size_t n) {
  constexpr int kBits = 11;
  constexpr std::size_t kBuckets = std::size_t{1} << kBits;
  constexpr std::size_t kSmall = 1024;
  if (n <= kSmall) {
    std::sort(a, a + n, [](const KeyedIndex& x, const KeyedIndex& y) { return x.first < y.first; });
    return;
  }
  std::uint64_t lo = a[0].first, hi = lo;
  for (std::size_t i = 1; i < n; ++i) {
    lo = std::min(lo, a[i].first);
    hi = std::max(hi, a[i].first);
  }
  if (lo == hi) return;
  const int shift = std::max(0, 64 - std::countl_zero(hi - lo) - kBits);
  std::vector<std::size_t> start(kBuckets + 1, 0);
  for (std::size_t i = 0; i < n; ++i) ++start[((a[i].first - lo) >> shift) + 1];
  for (std::size_t b = 1; b <= kBuckets; ++b) start[b] += start[b - 1];
  std::vector<std::size_t> pos(start.begin(), start.end() - 1);
  for (std::size_t i = 0; i < n; ++i) tmp[pos[(a[i].first - lo) >> shift]++] = a[i];
  std::copy(tmp, tmp + n, a);
  for (std::size_t b = 0; b < kBuckets; ++b) {
    const std::size_t m = start[b + 1] - start[b];
    if (m > 1) radix_sort(a + start[b], tmp + start[b], m);
  }
}

}  // namespace

RankVector ranks_from_scores(std::span<const double> scores) {
  const std::size_t n = scores.size();
  if (n == 0) throw ValidationError("cannot rank an empty score vector");
  if (n > std::numeric_limits<std::uint32_t>::max()) throw ValidationError("too many scores to rank");
  std::vector<KeyedIndex> items(n), tmp(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (std::isnan(scores[i])) throw ValidationError("NaN depth score");
    items[i] = {sort_key(scores[i]), static_cast<std::uint32_t>(i)};
  }
  radix_sort(items.data(), tmp.data(), n);
  // Tied scores share the largest rank of their block.
  RankVector out{std::vector<std::int64_t>(n)};
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i + 1;
    while (j < n && items[j].first == items[i].first) ++j;
    for (std::size_t t = i; t < j; ++t) out.ranks[items[t].second] = static_cast<std::int64_t>(j);
    i = j;
  }
  return out;
}

RankPrefix::RankPrefix(const RankVector& ranks) : prefix_(ranks.size() + 1, 0) {
  for (std::size_t i = 0; i < ranks.size(); ++i) prefix_[i + 1] = prefix_[i] + ranks.ranks[i];
}

double kw_statistic(const RankVector& ranks, const ChangePointSet& cps) {
  const std::size_t n = ranks.size();
  if (cps.length() != n) throw ValidationError("change-point set length does not match ranks");
  const RankPrefix prefix(ranks);
  const auto bounds = cps.boundaries();
  double acc = 0.0;
  for (std::size_t s = 0; s + 1 < bounds.size(); ++s) {
    const auto total = static_cast<double>(prefix.sum(bounds[s], bounds[s + 1]));
    acc += total * total / static_cast<double>(bounds[s + 1] - bounds[s]);
  }
  const auto nd = static_cast<double>(n);
  return 12.0 / (nd * (nd + 1.0)) * acc - 3.0 * (nd + 1.0);
}

CusumProcess cusum_process(const RankVector& ranks) {
  const std::size_t n = ranks.size();
  if (n < 2) throw ValidationError("CUSUM needs n >= 2");
  const auto nd = static_cast<double>(n);
  const double scale = 1.0 / (std::sqrt(nd) * std::sqrt((nd * nd - 1.0) / 12.0));
  CusumProcess out{n, std::vector<double>(n)};
  // Twice the centered partial sum stays an exact integer.
  std::int64_t twice = 0;
  const auto np1 = static_cast<std::int64_t>(n) + 1;
  for (std::size_t i = 0; i < n; ++i) {
    twice += 2 * ranks.ranks[i] - np1;
    out.z[i] = 0.5 * static_cast<double>(twice) * scale;
  }
  return out;
}

double epidemic_statistic(const RankVector& ranks, std::size_t r1, std::size_t r2) {
  const std::size_t n = ranks.size();
  if (!(1 <= r1 && r1 < r2 && r2 <= n)) {
    throw ValidationError("epidemic window needs 1 <= r1 < r2 <= n");
  }
  const RankPrefix prefix(ranks);
  const auto inside = static_cast<double>(prefix.sum(r1 - 1, r2 - 1));
  const auto outside = static_cast<double>(prefix.total() - prefix.sum(r1 - 1, r2 - 1));
  return detail::epidemic_from_sums(static_cast<double>(n), inside, outside,
                                    static_cast<double>(r2 - r1));
}

double epidemic_statistic_centered(const RankVector& ranks, std::size_t r1, std::size_t r2) {
  const std::size_t n = ranks.size();
  if (!(1 <= r1 && r1 < r2 && r2 <= n)) {
    throw ValidationError("epidemic window needs 1 <= r1 < r2 <= n");
  }
  const RankPrefix prefix(ranks);
  const auto nd = static_cast<double>(n);
  const auto len = static_cast<double>(r2 - r1);
  const double centered = static_cast<double>(prefix.sum(r1 - 1, r2 - 1)) - len * (nd + 1.0) / 2.0;
  const double sigma = std::sqrt((nd * nd - 1.0) / 12.0);
  const double q = (nd * nd - 1.0) / (nd * (nd + 1.0));
  const double frac = len / nd;
  const double z = centered / (std::sqrt(nd) * sigma);
  return q / (frac * (1.0 - frac)) * z * z;
}

std::size_t kw_amoc_argmax(const RankVector& ranks) {
  const std::size_t n = ranks.size();
  if (n < 2) throw ValidationError("need n >= 2");
  const RankPrefix prefix(ranks);
  const auto nd = static_cast<double>(n);
  std::size_t best_k = 1;
  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 1; k < n; ++k) {
    const auto left = static_cast<double>(prefix.sum(0, k));
    const auto right = static_cast<double>(prefix.sum(k, n));
    const double w = left * left / static_cast<double>(k) + right * right / (nd - static_cast<double>(k));
    if (w > best) {
      best = w;
      best_k = k;
    }
  }
  return best_k;
}

}  // namespace fkwc
