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
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "fkwc/core.hpp"
#include "fkwc/depth.hpp"
#include "fkwc/detect.hpp"
#include "fkwc/simgen.hpp"

namespace fkwc {

/// (2/(l m)) sum|a_i - b_j| - (1/l^2) sum|a_i - a_j| - (1/m^2) sum|b_i - b_j|.
/// nullopt when either set is empty.
std::optional<double> energy_distance(const ChangePointSet& est, const ChangePointSet& truth);

struct MethodSpec {
  DepthMethod depth = DepthMethod::kMfhdDeriv;
  Detector detector = Detector::kEpidemic;
  NullMode null_mode = NullMode::kPermutation;

  std::string label() const;  // e.g. "mfhd-deriv/epidemic/permutation"
};

struct StudyScenario {
  std::string name;
  std::string effect;  // free-form effect descriptor, e.g. "beta 1->3"
  Scenario scenario;   // scenario.seed is ignored; replicates derive their own
};

struct PowerStudyConfig {
  std::vector<StudyScenario> scenarios;
  std::vector<MethodSpec> methods;
  std::size_t reps = 200;
  std::size_t null_reps = 999;
  double alpha = 0.05;
  std::optional<std::size_t> min_gap;  // epidemic window; default ceil(0.1 n)
  DepthOptions depth;
  std::uint64_t seed = 0;
};

struct PeltStudyConfig {
  std::vector<StudyScenario> scenarios;
  std::vector<DepthMethod> depths;
  std::vector<double> lambda_primes;
  std::size_t reps = 200;
  std::size_t min_segment = 2;
  DepthOptions depth;
  std::uint64_t seed = 0;
};

struct PowerCell {
  std::string scenario;
  std::string effect;
  Distribution distribution = Distribution::kGauss;
  Layout layout = Layout::kNone;
  std::size_t n = 0;
  MethodSpec method;
  std::size_t reps = 0;
  std::size_t rejections = 0;
  double rate = 0.0;
  double se = 0.0;  // binomial standard error sqrt(rate (1 - rate) / reps)
  std::vector<double> p_values;
};

struct PeltCell {
  std::string scenario;
  std::string effect;
  std::size_t n = 0;
  DepthMethod depth = DepthMethod::kRpDeriv;
  double lambda_prime = 0.0;
  std::size_t reps = 0;
  std::size_t true_count = 0;
  double mean_abs_error = 0.0;  // mean |l - l_hat|
  double mean_estimated = 0.0;  // mean l_hat
  std::size_t failures = 0;     // empty estimate with a nonempty truth
  double failure_rate = 0.0;
  std::optional<double> mean_energy;  // over replicates where it is defined
  std::map<long, std::size_t> count_error;  // l_hat - l -> replicates
  std::vector<std::optional<double>> energies;
};

struct StudyReport {
  std::uint64_t seed = 0;
  std::vector<PowerCell> power;
  std::vector<PeltCell> pelt;

  /// scenario,distribution,layout,n,effect,depth,detector,null,reps,rejections,rate,se
  std::string power_csv() const;
  /// scenario,n,effect,depth,lambda_prime,reps,true_count,mean_abs_error,mean_estimated,
  /// failures,failure_rate,mean_energy
  std::string pelt_csv() const;
  std::string json_summary() const;
};

/// Seed of replicate `rep` of scenario `index` in a study with master `seed`.
std::uint64_t replicate_seed(std::uint64_t seed, std::size_t index, std::size_t rep);

StudyReport run_power_study(const PowerStudyConfig& config);
StudyReport run_pelt_study(const PeltStudyConfig& config);

/// Parses a study document with optional "power" and "pelt" sections. Throws
/// ValidationError when it is malformed or holds no scenarios.
struct StudyConfig {
  std::optional<PowerStudyConfig> power;
  std::optional<PeltStudyConfig> pelt;
};
StudyConfig study_config_from_json(const std::string& text, std::optional<std::uint64_t> seed);

}  // namespace fkwc
