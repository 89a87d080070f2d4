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

#include "fkwc/eval.hpp"

#include <cmath>
#include <cstdlib>
#include <iomanip>
#include <numeric>
#include <sstream>
#include <tuple>

#include "fkwc/nulldist.hpp"
#include "fkwc/rankstat.hpp"
#include "fkwc/rng.hpp"
#include "json.hpp"

namespace fkwc {

std::optional<double> energy_distance(const ChangePointSet& est, const ChangePointSet& truth) {
  const auto& a = est.points();
  const auto& b = truth.points();
  if (a.empty() || b.empty()) return std::nullopt;
  auto absdiff = [](std::size_t x, std::size_t y) -> std::int64_t {
    return x > y ? static_cast<std::int64_t>(x - y) : static_cast<std::int64_t>(y - x);
  };
  std::int64_t cross = 0, within_a = 0, within_b = 0;
  for (std::size_t x : a)
    for (std::size_t y : b) cross += absdiff(x, y);
  for (std::size_t x : a)
    for (std::size_t y : a) within_a += absdiff(x, y);
  for (std::size_t x : b)
    for (std::size_t y : b) within_b += absdiff(x, y);
  const auto l = static_cast<double>(a.size());
  const auto m = static_cast<double>(b.size());
  // The within terms are summed first so the result is symmetric in (est, truth).
  return 2.0 * static_cast<double>(cross) / (l * m) -
         (static_cast<double>(within_a) / (l * l) + static_cast<double>(within_b) / (m * m));
}

std::string MethodSpec::label() const {
  return std::string(to_string(depth)) + "/" + std::string(to_string(detector)) + "/" +
         std::string(to_string(null_mode));
}

std::uint64_t replicate_seed(std::uint64_t seed, std::size_t index, std::size_t rep) {
  return derive_seed(derive_seed(seed, 0x5ce0 + index), rep);
}

namespace {

constexpr std::uint64_t kDepthSeedStream = 7;
constexpr std::uint64_t kOwnNullStream = 8;

bool is_permutation_of_1_to_n(const RankVector& r) {
  std::vector<char> seen(r.size() + 1, 0);
  for (std::int64_t v : r.ranks) {
    if (v < 1 || static_cast<std::size_t>(v) > r.size() || seen[static_cast<std::size_t>(v)]) {
      return false;
    }
    seen[static_cast<std::size_t>(v)] = 1;
  }
  return true;
}

std::size_t default_gap(std::size_t n) { return (n + 9) / 10; }

using NullKey = std::tuple<std::size_t, int, std::size_t, int>;

std::uint64_t null_seed(std::uint64_t seed, const NullKey& k) {
  std::uint64_t s = derive_seed(seed, 0x6e75);
  s = derive_seed(s, std::get<0>(k));
  s = derive_seed(s, static_cast<std::uint64_t>(std::get<1>(k)));
  s = derive_seed(s, std::get<2>(k));
  return derive_seed(s, static_cast<std::uint64_t>(std::get<3>(k)));
}

Scenario replicate_scenario(const Scenario& base, std::uint64_t seed) {
  Scenario sc = base;
  sc.seed = seed;
  return sc;
}

std::string fmt(double v) {
  std::ostringstream os;
  os << std::setprecision(10) << v;
  return os.str();
}

}  // namespace

StudyReport run_power_study(const PowerStudyConfig& config) {
  if (config.scenarios.empty()) throw ValidationError("power study has no scenarios");
  if (config.methods.empty()) throw ValidationError("power study has no methods");
  if (config.reps < 1) throw ValidationError("power study needs reps >= 1");
  if (config.null_reps < 1) throw ValidationError("power study needs null_reps >= 1");
  for (const MethodSpec& m : config.methods) {
    if (m.detector == Detector::kPelt) throw ValidationError("power study methods must be tests");
  }
  StudyReport report;
  report.seed = config.seed;

  for (std::size_t si = 0; si < config.scenarios.size(); ++si) {
    const StudyScenario& study = config.scenarios[si];
    study.scenario.validate();
    const std::size_t n = study.scenario.n;
    const std::size_t gap = config.min_gap.value_or(default_gap(n));

    // Null laws of a permutation of 1..n are shared by every replicate.
    std::map<NullKey, NullSample> shared;
    for (const MethodSpec& m : config.methods) {
      const bool epi = m.detector == Detector::kEpidemic;
      if (!epi && m.null_mode == NullMode::kAsymptotic) continue;
      const NullKey key{n, epi ? 1 : 0, epi ? gap : 0, m.null_mode == NullMode::kAsymptotic};
      if (shared.count(key)) continue;
      const std::uint64_t s = null_seed(config.seed, key);
      shared[key] = m.null_mode == NullMode::kAsymptotic
                        ? bridge_epidemic_null(n, gap, config.null_reps, s)
                        : permutation_null(n, epi ? ScanKind::kEpidemic : ScanKind::kAmoc, gap,
                                           config.null_reps, s);
    }

    const std::size_t nm = config.methods.size();
    std::vector<double> pvals(nm * config.reps, 1.0);
    const auto reps = static_cast<std::int64_t>(config.reps);
#pragma omp parallel for schedule(dynamic)
    for (std::int64_t r = 0; r < reps; ++r) {
      const auto rep = static_cast<std::size_t>(r);
      const std::uint64_t rs = replicate_seed(config.seed, si, rep);
      const auto [sample, truth] = build_scenario(replicate_scenario(study.scenario, rs));
      std::map<DepthMethod, RankVector> ranked;
      for (std::size_t mi = 0; mi < nm; ++mi) {
        const MethodSpec& m = config.methods[mi];
        if (!ranked.count(m.depth)) {
          PipelineOptions po;
          po.depth = config.depth;
          po.seed = derive_seed(rs, kDepthSeedStream);
          ranked[m.depth] = rank_sample(sample, m.depth, po).ranks;
        }
        const RankVector& ranks = ranked[m.depth];
        const bool epi = m.detector == Detector::kEpidemic;
        const double stat =
            epi ? epidemic_scan(ranks, gap).statistic : amoc_scan(ranks).statistic;
        double p = 1.0;
        if (!epi && m.null_mode == NullMode::kAsymptotic) {
          p = kolmogorov_survival(stat);
        } else if (m.null_mode == NullMode::kAsymptotic || is_permutation_of_1_to_n(ranks)) {
          const NullKey key{n, epi ? 1 : 0, epi ? gap : 0, m.null_mode == NullMode::kAsymptotic};
          p = shared.at(key).p_value(stat);
        } else {
          // Tied ranks: condition on the observed rank multiset instead.
          p = permutation_null(ranks, epi ? ScanKind::kEpidemic : ScanKind::kAmoc, gap,
                               config.null_reps, derive_seed(rs, kOwnNullStream + mi))
                  .p_value(stat);
        }
        pvals[mi * config.reps + rep] = p;
      }
    }

    for (std::size_t mi = 0; mi < nm; ++mi) {
      PowerCell cell;
      cell.scenario = study.name;
      cell.effect = study.effect;
      cell.distribution = study.scenario.distribution;
      cell.layout = study.scenario.layout;
      cell.n = n;
      cell.method = config.methods[mi];
      cell.reps = config.reps;
      cell.p_values.assign(pvals.begin() + static_cast<std::ptrdiff_t>(mi * config.reps),
                           pvals.begin() + static_cast<std::ptrdiff_t>((mi + 1) * config.reps));
      for (double p : cell.p_values) cell.rejections += p <= config.alpha ? 1 : 0;
      cell.rate = static_cast<double>(cell.rejections) / static_cast<double>(cell.reps);
      cell.se = std::sqrt(cell.rate * (1.0 - cell.rate) / static_cast<double>(cell.reps));
      report.power.push_back(std::move(cell));
    }
  }
  return report;
}

StudyReport run_pelt_study(const PeltStudyConfig& config) {
  if (config.scenarios.empty()) throw ValidationError("PELT study has no scenarios");
  if (config.depths.empty()) throw ValidationError("PELT study has no depth methods");
  if (config.lambda_primes.empty()) throw ValidationError("PELT study has no lambda_prime grid");
  if (config.reps < 1) throw ValidationError("PELT study needs reps >= 1");
  StudyReport report;
  report.seed = config.seed;

  for (std::size_t si = 0; si < config.scenarios.size(); ++si) {
    const StudyScenario& study = config.scenarios[si];
    study.scenario.validate();
    const std::size_t n = study.scenario.n;
    const std::size_t nd = config.depths.size();
    const std::size_t nl = config.lambda_primes.size();
    // estimates[(d * nl + l) * reps + rep]
    std::vector<ChangePointSet> estimates(nd * nl * config.reps);
    std::vector<ChangePointSet> truths(config.reps);
    const auto reps = static_cast<std::int64_t>(config.reps);
#pragma omp parallel for schedule(dynamic)
    for (std::int64_t r = 0; r < reps; ++r) {
      const auto rep = static_cast<std::size_t>(r);
      const std::uint64_t rs = replicate_seed(config.seed, si, rep);
      auto [sample, truth] = build_scenario(replicate_scenario(study.scenario, rs));
      truths[rep] = std::move(truth);
      for (std::size_t di = 0; di < nd; ++di) {
        PipelineOptions po;
        po.depth = config.depth;
        po.seed = derive_seed(rs, kDepthSeedStream);
        const RankVector ranks = rank_sample(sample, config.depths[di], po).ranks;
        for (std::size_t li = 0; li < nl; ++li) {
          PeltConfig pc;
          pc.lambda_prime = config.lambda_primes[li];
          pc.min_segment = config.min_segment;
          estimates[(di * nl + li) * config.reps + rep] = pelt_detect(ranks, pc);
        }
      }
    }

    for (std::size_t di = 0; di < nd; ++di) {
      for (std::size_t li = 0; li < nl; ++li) {
        PeltCell cell;
        cell.scenario = study.name;
        cell.effect = study.effect;
        cell.n = n;
        cell.depth = config.depths[di];
        cell.lambda_prime = config.lambda_primes[li];
        cell.reps = config.reps;
        cell.true_count = truths.front().count();
        double abs_sum = 0.0, est_sum = 0.0, energy_sum = 0.0;
        std::size_t energy_n = 0;
        for (std::size_t rep = 0; rep < config.reps; ++rep) {
          const ChangePointSet& est = estimates[(di * nl + li) * config.reps + rep];
          const ChangePointSet& truth = truths[rep];
          const long diff = static_cast<long>(est.count()) - static_cast<long>(truth.count());
          abs_sum += static_cast<double>(std::labs(diff));
          est_sum += static_cast<double>(est.count());
          ++cell.count_error[diff];
          if (est.empty() && !truth.empty()) ++cell.failures;
          const auto e = energy_distance(est, truth);
          cell.energies.push_back(e);
          if (e) {
            energy_sum += *e;
            ++energy_n;
          }
        }
        const auto rd = static_cast<double>(config.reps);
        cell.mean_abs_error = abs_sum / rd;
        cell.mean_estimated = est_sum / rd;
        cell.failure_rate = static_cast<double>(cell.failures) / rd;
        if (energy_n > 0) cell.mean_energy = energy_sum / static_cast<double>(energy_n);
        report.pelt.push_back(std::move(cell));
      }
    }
  }
  return report;
}

std::string StudyReport::power_csv() const {
  std::ostringstream os;
  os << "scenario,distribution,layout,n,effect,depth,detector,null,reps,rejections,rate,se\n";
  for (const PowerCell& c : power) {
    os << c.scenario << ',' << to_string(c.distribution) << ',' << to_string(c.layout) << ','
       << c.n << ',' << c.effect << ',' << to_string(c.method.depth) << ','
       << to_string(c.method.detector) << ',' << to_string(c.method.null_mode) << ',' << c.reps
       << ',' << c.rejections << ',' << fmt(c.rate) << ',' << fmt(c.se) << '\n';
  }
  return os.str();
}

std::string StudyReport::pelt_csv() const {
  std::ostringstream os;
  os << "scenario,n,effect,depth,lambda_prime,reps,true_count,mean_abs_error,mean_estimated,"
        "failures,failure_rate,mean_energy\n";
  for (const PeltCell& c : pelt) {
    os << c.scenario << ',' << c.n << ',' << c.effect << ',' << to_string(c.depth) << ','
       << fmt(c.lambda_prime) << ',' << c.reps << ',' << c.true_count << ','
       << fmt(c.mean_abs_error) << ',' << fmt(c.mean_estimated) << ',' << c.failures << ','
       << fmt(c.failure_rate) << ',' << (c.mean_energy ? fmt(*c.mean_energy) : "NA") << '\n';
  }
  return os.str();
}

std::string StudyReport::json_summary() const {
  nlohmann::ordered_json j;
  j["seed"] = seed;
  j["power"] = nlohmann::ordered_json::array();
  for (const PowerCell& c : power) {
    j["power"].push_back({{"scenario", c.scenario},
                          {"effect", c.effect},
                          {"distribution", to_string(c.distribution)},
                          {"layout", to_string(c.layout)},
                          {"n", c.n},
                          {"method", c.method.label()},
                          {"reps", c.reps},
                          {"rejections", c.rejections},
                          {"rate", c.rate},
                          {"se", c.se}});
  }
  j["pelt"] = nlohmann::ordered_json::array();
  for (const PeltCell& c : pelt) {
    nlohmann::ordered_json hist = nlohmann::ordered_json::object();
    for (const auto& [k, v] : c.count_error) hist[std::to_string(k)] = v;
    nlohmann::ordered_json e = {{"scenario", c.scenario},
                                {"effect", c.effect},
                                {"n", c.n},
                                {"depth", to_string(c.depth)},
                                {"lambda_prime", c.lambda_prime},
                                {"reps", c.reps},
                                {"true_count", c.true_count},
                                {"mean_abs_error", c.mean_abs_error},
                                {"mean_estimated", c.mean_estimated},
                                {"failures", c.failures},
                                {"failure_rate", c.failure_rate},
                                {"count_error", hist}};
    e["mean_energy"] = c.mean_energy ? nlohmann::ordered_json(*c.mean_energy) : nullptr;
    j["pelt"].push_back(e);
  }
  return j.dump(2);
}

namespace {

using nlohmann::json;

DepthMethod depth_from(const std::string& s) {
  const auto d = parse_depth_method(s);
  if (!d) {
    throw ValidationError("unknown depth '" + s +
                          "' (rp, rp-deriv, mfhd, mfhd-deriv, norm, norm-deriv)");
  }
  return *d;
}

std::vector<StudyScenario> scenarios_from(const json& arr) {
  std::vector<StudyScenario> out;
  for (const json& e : arr) {
    StudyScenario s;
    s.name = e.at("name").get<std::string>();
    s.effect = e.value("effect", std::string());
    s.scenario = scenario_from_json(e.at("scenario").dump());
    out.push_back(std::move(s));
  }
  if (out.empty()) throw ValidationError("study section has an empty scenario list");
  return out;
}

DepthOptions depth_options_from(const json& j) {
  DepthOptions d;
  if (!j.contains("depth")) return d;
  const json& o = j.at("depth");
  d.projections = o.value("projections", d.projections);
  d.basis_size = o.value("basis_size", d.basis_size);
  d.tukey_directions = o.value("tukey_directions", d.tukey_directions);
  return d;
}

}  // namespace

StudyConfig study_config_from_json(const std::string& text, std::optional<std::uint64_t> seed) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ValidationError(std::string("malformed study JSON: ") + e.what());
  }
  try {
    StudyConfig cfg;
    const std::uint64_t master = seed.value_or(j.value("seed", std::uint64_t{0}));
    const DepthOptions depth = depth_options_from(j);
    if (j.contains("power")) {
      const json& p = j.at("power");
      PowerStudyConfig pc;
      pc.scenarios = scenarios_from(p.at("scenarios"));
      for (const json& m : p.at("methods")) {
        MethodSpec ms;
        ms.depth = depth_from(m.at("depth").get<std::string>());
        const auto det = parse_detector(m.value("detector", std::string("epidemic")));
        if (!det || *det == Detector::kPelt) {
          throw ValidationError("power study detector must be amoc or epidemic");
        }
        ms.detector = *det;
        const auto nm = parse_null_mode(m.value("null", std::string("permutation")));
        if (!nm) throw ValidationError("null must be asymptotic or permutation");
        ms.null_mode = *nm;
        pc.methods.push_back(ms);
      }
      pc.reps = p.value("reps", pc.reps);
      pc.null_reps = p.value("null_reps", pc.null_reps);
      pc.alpha = p.value("alpha", pc.alpha);
      if (p.contains("min_gap")) pc.min_gap = p.at("min_gap").get<std::size_t>();
      pc.depth = depth;
      pc.seed = derive_seed(master, 1);
      cfg.power = std::move(pc);
    }
    if (j.contains("pelt")) {
      const json& p = j.at("pelt");
      PeltStudyConfig pc;
      pc.scenarios = scenarios_from(p.at("scenarios"));
      for (const json& d : p.at("depths")) pc.depths.push_back(depth_from(d.get<std::string>()));
      pc.lambda_primes = p.at("lambda_primes").get<std::vector<double>>();
      pc.reps = p.value("reps", pc.reps);
      pc.min_segment = p.value("min_segment", pc.min_segment);
      pc.depth = depth;
      pc.seed = derive_seed(master, 2);
      cfg.pelt = std::move(pc);
    }
    if (!cfg.power && !cfg.pelt) throw ValidationError("study has neither power nor pelt section");
    return cfg;
  } catch (const json::exception& e) {
    throw ValidationError(std::string("malformed study JSON: ") + e.what());
  }
}

}  // namespace fkwc
