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

// Serial reference kernels against the OpenMP kernels, plus ranks + PELT scaling.
// Thread count for the parallel kernels is the benchmark argument.

#include <benchmark/benchmark.h>
#include <omp.h>

#include <cmath>
#include <random>

#include "fkwc/depth.hpp"
#include "fkwc/detect.hpp"
#include "fkwc/rankstat.hpp"
#include "fkwc/reference.hpp"

namespace {

fkwc::FunctionalSample sample(std::size_t n, std::size_t points, bool gradients) {
  std::mt19937_64 eng(1);
  std::normal_distribution<double> z;
  const fkwc::Grid g = fkwc::Grid::line(points);
  fkwc::FunctionalSample s{g, fkwc::Matrix(n, points), {}};
  for (double& v : s.values.data()) v = z(eng);
  return gradients ? fkwc::finite_diff_gradient(s) : s;
}

constexpr std::size_t kN = 400;
constexpr std::size_t kPoints = 100;

void BM_RpSerial(benchmark::State& st) {
  const auto s = sample(kN, kPoints, false);
  const auto dirs = fkwc::draw_directions(s.grid, 50, 21, 3);
  for (auto _ : st) benchmark::DoNotOptimize(fkwc::reference::rp_depth_serial(s, dirs, false));
}

void BM_RpParallel(benchmark::State& st) {
  omp_set_num_threads(static_cast<int>(st.range(0)));
  const auto s = sample(kN, kPoints, false);
  const auto dirs = fkwc::draw_directions(s.grid, 50, 21, 3);
  for (auto _ : st) benchmark::DoNotOptimize(fkwc::rp_depth(s, dirs, false));
}

void BM_MfhdSerial(benchmark::State& st) {
  const auto s = sample(kN, kPoints, st.range(0) != 0);
  for (auto _ : st) benchmark::DoNotOptimize(fkwc::reference::mfhd_depth_serial(s, st.range(0) != 0));
}

void BM_MfhdParallel(benchmark::State& st) {
  omp_set_num_threads(static_cast<int>(st.range(1)));
  const auto s = sample(kN, kPoints, st.range(0) != 0);
  for (auto _ : st) benchmark::DoNotOptimize(fkwc::mfhd_depth(s, st.range(0) != 0));
}

void BM_RanksPelt(benchmark::State& st) {
  const auto n = static_cast<std::size_t>(st.range(0));
  std::mt19937_64 eng(2);
  std::normal_distribution<double> z;
  std::uniform_real_distribution<double> u(0.0, 1.0), spread(0.5, 2.0);
  std::vector<double> scores(n);
  double scale = 1.0;
  for (auto& v : scores) {
    if (u(eng) < 1.0 / 500.0) scale = spread(eng);
    v = -std::abs(scale * z(eng));
  }
  for (auto _ : st) {
    const auto r = fkwc::ranks_from_scores(scores);
    benchmark::DoNotOptimize(fkwc::pelt_detect(r, fkwc::PeltConfig{}));
  }
  st.SetComplexityN(st.range(0));
}

}  // namespace

BENCHMARK(BM_RpSerial)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_RpParallel)
    ->Arg(1)->Arg(2)->Arg(4)->Arg(8)
    ->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_MfhdSerial)->Arg(0)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_MfhdParallel)
    ->Args({0, 1})->Args({0, 2})->Args({0, 4})->Args({0, 8})
    ->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_MfhdSerial)
    ->Arg(1)->Unit(benchmark::kMillisecond)->UseRealTime()->Iterations(1);
BENCHMARK(BM_MfhdParallel)
    ->Args({1, 1})->Args({1, 4})
    ->Unit(benchmark::kMillisecond)->UseRealTime()->Iterations(1);
BENCHMARK(BM_RanksPelt)
    ->RangeMultiplier(10)->Range(10000, 1000000)
    ->Unit(benchmark::kMillisecond)->UseRealTime()->Complexity(benchmark::oN);

BENCHMARK_MAIN();
