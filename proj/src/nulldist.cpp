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

#include "fkwc/nulldist.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <numeric>

#include "json.hpp"
#include "fkwc/rng.hpp"

namespace fkwc {

double kolmogorov_survival(double x) {
  if (x <= 0.0) return 1.0;
  constexpr double kTol = 1e-12;
  if (x < 1.0) {
    // Theta-function form converges fast for small x.
    const double pi2 = std::numbers::pi * std::numbers::pi;
    double cdf = 0.0;
    for (int k = 1; k < 100; ++k) {
      const double odd = 2.0 * k - 1.0;
      const double term = std::exp(-odd * odd * pi2 / (8.0 * x * x));
      cdf += term;
      if (term < kTol) break;
    }
    cdf *= std::sqrt(2.0 * std::numbers::pi) / x;
    return std::clamp(1.0 - cdf, 0.0, 1.0);
  }
  double sum = 0.0;
  for (int k = 1; k < 100; ++k) {
    const double term = std::exp(-2.0 * k * k * x * x);
    sum += (k % 2 == 1) ? term : -term;
    if (term < kTol) break;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

double kolmogorov_critical_value(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw ValidationError("alpha must lie in (0, 1)");
  double lo = 0.0;
  double hi = 10.0;
  while (hi - lo > 1e-12) {
    const double mid = 0.5 * (lo + hi);
    (kolmogorov_survival(mid) > alpha ? lo : hi) = mid;
  }
  return hi;
}

AmocScan amoc_scan(const RankVector& ranks) {
  const std::size_t n = ranks.size();
  if (n < 2) throw ValidationError("AMOC scan needs n >= 2");
  const auto np1 = static_cast<std::int64_t>(n) + 1;
  std::int64_t twice = 0;
  std::int64_t best = -1;
  std::size_t best_i = 1;
  for (std::size_t i = 1; i < n; ++i) {
    twice += 2 * ranks.ranks[i - 1] - np1;
    const std::int64_t mag = twice < 0 ? -twice : twice;
    if (mag > best) {
      best = mag;
      best_i = i;
    }
  }
  const auto nd = static_cast<double>(n);
  const double scale = 1.0 / (std::sqrt(nd) * std::sqrt((nd * nd - 1.0) / 12.0));
  return {0.5 * static_cast<double>(best) * scale, best_i};
}

EpidemicScan epidemic_scan(const RankVector& ranks, std::size_t min_gap) {
  const std::size_t n = ranks.size();
  if (min_gap < 1 || min_gap >= n) throw ValidationError("epidemic scan needs 1 <= min_gap < n");
  std::vector<double> prefix(n + 1, 0.0);
  {
    std::int64_t acc = 0;
    for (std::size_t i = 0; i < n; ++i) {
      acc += ranks.ranks[i];
      prefix[i + 1] = static_cast<double>(acc);
    }
  }
  const double total = prefix[n];
  const auto nd = static_cast<double>(n);
  EpidemicScan best{-std::numeric_limits<double>::infinity(), 0, 0};
  for (std::size_t r1 = 1; r1 + min_gap <= n; ++r1) {
    for (std::size_t r2 = r1 + min_gap; r2 <= n; ++r2) {
      const double inside = prefix[r2 - 1] - prefix[r1 - 1];
      const double w = detail::epidemic_from_sums(nd, inside, total - inside,
                                                  static_cast<double>(r2 - r1));
      if (w > best.statistic) best = {w, r1, r2};
    }
  }
  return best;
}

NullSample::NullSample(std::vector<double> draws) : draws_(std::move(draws)) {
  std::sort(draws_.begin(), draws_.end());
}

double NullSample::p_value(double observed) const {
  const double cut = observed - 1e-12 * std::max(1.0, std::abs(observed));
  const auto at_least = static_cast<double>(
      draws_.end() - std::lower_bound(draws_.begin(), draws_.end(), cut));
  return (1.0 + at_least) / (static_cast<double>(draws_.size()) + 1.0);
}

double NullSample::upper_quantile(double alpha) const {
  if (draws_.empty()) throw ValidationError("empty null sample");
  const auto size = static_cast<double>(draws_.size());
  for (std::size_t i = 0; i < draws_.size(); ++i) {
    const auto above = static_cast<double>(
        draws_.end() - std::upper_bound(draws_.begin(), draws_.end(), draws_[i]));
    if (above / size <= alpha) return draws_[i];
  }
  return draws_.back();
}

namespace {

double scan_statistic(const RankVector& ranks, ScanKind kind, std::size_t min_gap) {
  return kind == ScanKind::kAmoc ? amoc_scan(ranks).statistic
                                 : epidemic_scan(ranks, min_gap).statistic;
}

}  // namespace

NullSample permutation_null(const RankVector& ranks, ScanKind kind, std::size_t min_gap,
                            std::size_t reps, std::uint64_t seed) {
  if (reps < 1) throw ValidationError("need at least one permutation replicate");
  std::vector<double> draws(reps);
  const auto count = static_cast<std::ptrdiff_t>(reps);
#pragma omp parallel for schedule(dynamic, 4)
  for (std::ptrdiff_t r = 0; r < count; ++r) {
    RankVector perm = ranks;
    Engine eng = make_engine(seed, static_cast<std::uint64_t>(r));
    std::shuffle(perm.ranks.begin(), perm.ranks.end(), eng);
    draws[static_cast<std::size_t>(r)] = scan_statistic(perm, kind, min_gap);
  }
  return NullSample(std::move(draws));
}

NullSample permutation_null(std::size_t n, ScanKind kind, std::size_t min_gap, std::size_t reps,
                            std::uint64_t seed) {
  RankVector identity{std::vector<std::int64_t>(n)};
  std::iota(identity.ranks.begin(), identity.ranks.end(), std::int64_t{1});
  return permutation_null(identity, kind, min_gap, reps, seed);
}

NullSample bridge_epidemic_null(std::size_t n, std::size_t min_gap, std::size_t reps,
                                std::uint64_t seed) {
  if (reps < 1) throw ValidationError("need at least one Monte Carlo path");
  if (min_gap < 1 || min_gap >= n) throw ValidationError("need 1 <= min_gap < n");
  std::vector<double> draws(reps);
  const auto nd = static_cast<double>(n);
  const auto count = static_cast<std::ptrdiff_t>(reps);
#pragma omp parallel for schedule(dynamic, 4)
  for (std::ptrdiff_t r = 0; r < count; ++r) {
    Engine eng = make_engine(seed, static_cast<std::uint64_t>(r));
    std::normal_distribution<double> normal;
    std::vector<double> walk(n + 1, 0.0);
    for (std::size_t i = 1; i <= n; ++i) walk[i] = walk[i - 1] + normal(eng) / std::sqrt(nd);
    std::vector<double> bridge(n + 1);
    for (std::size_t i = 0; i <= n; ++i) {
      bridge[i] = walk[i] - static_cast<double>(i) / nd * walk[n];
    }
    // Window (i1, i2] mirrors the data windows r1 = i1 + 1, r2 = i2 + 1 <= n.
    double best = 0.0;
    for (std::size_t i1 = 0; i1 + min_gap <= n - 1; ++i1) {
      for (std::size_t i2 = i1 + min_gap; i2 <= n - 1; ++i2) {
        const double t = static_cast<double>(i2 - i1) / nd;
        const double diff = bridge[i2] - bridge[i1];
        best = std::max(best, diff * diff / (t * (1.0 - t)));
      }
    }
    draws[static_cast<std::size_t>(r)] = best;
  }
  return NullSample(std::move(draws));
}

CriticalValueTable CriticalValueTable::load(const std::filesystem::path& path) {
  CriticalValueTable table;
  if (!std::filesystem::exists(path)) return table;
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  nlohmann::json doc;
  try {
    in >> doc;
    for (const auto& e : doc.at("entries")) {
      table.entries_.push_back({e.at("n").get<std::size_t>(), e.at("min_gap").get<std::size_t>(),
                                e.at("alpha").get<double>(), e.at("quantile").get<double>(),
                                e.at("reps").get<std::size_t>(), e.at("seed").get<std::uint64_t>(),
                                e.value("mode", std::string("permutation"))});
    }
  } catch (const nlohmann::json::exception& ex) {
    throw IoError("malformed critical-value table " + path.string() + ": " + ex.what());
  }
  return table;
}

void CriticalValueTable::save(const std::filesystem::path& path) const {
  nlohmann::json doc;
  doc["statistic"] = "epidemic";
  doc["entries"] = nlohmann::json::array();
  for (const auto& e : entries_) {
    doc["entries"].push_back({{"n", e.n},
                              {"min_gap", e.min_gap},
                              {"alpha", e.alpha},
                              {"quantile", e.quantile},
                              {"reps", e.reps},
                              {"seed", e.seed},
                              {"mode", e.mode}});
  }
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  out << doc.dump(2) << '\n';
}

std::optional<double> CriticalValueTable::find(std::size_t n, std::size_t min_gap, double alpha,
                                               std::size_t reps, std::uint64_t seed,
                                               const std::string& mode) const {
  for (const auto& e : entries_) {
    if (e.n == n && e.min_gap == min_gap && e.alpha == alpha && e.reps == reps &&
        e.seed == seed && e.mode == mode) {
      return e.quantile;
    }
  }
  return std::nullopt;
}

double CriticalValueTable::get_or_compute(std::size_t n, std::size_t min_gap, double alpha,
                                          std::size_t reps, std::uint64_t seed,
                                          const std::string& mode) {
  if (auto hit = find(n, min_gap, alpha, reps, seed, mode)) return *hit;
  NullSample null;
  if (mode == "permutation") {
    null = permutation_null(n, ScanKind::kEpidemic, min_gap, reps, seed);
  } else if (mode == "asymptotic") {
    null = bridge_epidemic_null(n, min_gap, reps, seed);
  } else {
    throw ValidationError("unknown null mode " + mode);
  }
  const double q = null.upper_quantile(alpha);
  entries_.push_back({n, min_gap, alpha, q, reps, seed, mode});
  return q;
}

}  // namespace fkwc
