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

#include <omp.h>

#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "fkwc/detect.hpp"
#include "fkwc/eval.hpp"
#include "fkwc/io.hpp"
#include "fkwc/nulldist.hpp"
#include "fkwc/simgen.hpp"
#include "json.hpp"

namespace {

using nlohmann::ordered_json;

struct Globals {
  std::optional<std::uint64_t> seed;
  int threads = 0;
  std::string output = "json";
  bool center = false;
};

std::uint64_t resolve_seed(const Globals& g) {
  if (g.seed) return *g.seed;
  if (const char* env = std::getenv("FKWC_SEED"); env && *env) {
    try {
      std::size_t used = 0;
      const unsigned long long v = std::stoull(env, &used);
      if (used == std::string(env).size()) return v;
    } catch (const std::exception&) {
    }
    throw fkwc::ValidationError("FKWC_SEED must be an unsigned integer");
  }
  return 0;
}

std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw fkwc::IoError("cannot open " + p.string());
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write_file(const std::filesystem::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  if (!out) throw fkwc::IoError("cannot write " + p.string());
  out << text;
  if (!out) throw fkwc::IoError("write failed for " + p.string());
}

std::string csv_list(const std::vector<std::size_t>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ";" : "") + std::to_string(v[i]);
  return s;
}

struct DetectArgs {
  std::string input;
  std::string depth = "rp-deriv";
  std::string method = "amoc";
  double lambda_prime = 0.3;
  std::optional<double> lambda;
  std::size_t min_gap = 2;
  std::string null_mode = "permutation";
  std::size_t reps = 999;
  std::size_t projections = 50;
  std::size_t basis_size = 21;
  std::size_t tukey_directions = 500;
  bool header = false;
};

int run_detect(const Globals& g, const DetectArgs& a) {
  const std::uint64_t seed = resolve_seed(g);
  fkwc::PipelineOptions opts;
  opts.depth.projections = a.projections;
  opts.depth.basis_size = a.basis_size;
  opts.depth.tukey_directions = a.tukey_directions;
  opts.null_mode = *fkwc::parse_null_mode(a.null_mode);
  opts.reps = a.reps;
  opts.min_gap = a.min_gap;
  opts.pelt.lambda_prime = a.lambda_prime;
  opts.pelt.lambda_override = a.lambda;
  opts.center = g.center;
  opts.seed = seed;
  const auto depth = *fkwc::parse_depth_method(a.depth);
  const auto method = *fkwc::parse_detector(a.method);

  const fkwc::FunctionalSample sample = fkwc::load_sample(a.input, a.header);
  const fkwc::TestResult r = fkwc::detect_pipeline(sample, depth, method, opts);

  if (g.output == "csv") {
    std::cout << "method,depth,statistic,p_value,changepoints,n,seed\n"
              << fkwc::to_string(r.method) << ',' << fkwc::to_string(depth) << ','
              << std::setprecision(17) << r.statistic << ','
              << (r.p_value ? std::to_string(*r.p_value) : std::string("NA")) << ','
              << csv_list(r.estimates.points()) << ',' << sample.size() << ',' << seed << '\n';
    return 0;
  }
  ordered_json j;
  j["method"] = fkwc::to_string(r.method);
  j["depth"] = fkwc::to_string(depth);
  j["statistic"] = r.statistic;
  if (r.p_value) j["p_value"] = *r.p_value;
  j["changepoints"] = r.estimates.points();
  j["n"] = sample.size();
  j["seed"] = seed;
  ordered_json params;
  params["null"] = fkwc::to_string(opts.null_mode);
  params["reps"] = opts.reps;
  params["min_gap"] = opts.min_gap;
  params["lambda_prime"] = opts.pelt.lambda_prime;
  if (r.lambda) params["lambda"] = *r.lambda;
  params["m_projections"] = opts.depth.projections;
  params["basis_size"] = opts.depth.basis_size;
  params["tukey_directions"] = opts.depth.tukey_directions;
  params["center"] = opts.center;
  if (r.kw_estimate) params["kw_estimate"] = *r.kw_estimate;
  j["params"] = params;
  std::cout << j.dump(2) << '\n';
  return 0;
}

struct SimulateArgs {
  std::string scenario;
  std::string out;
  std::string truth;
};

int run_simulate(const Globals& g, const SimulateArgs& a) {
  fkwc::Scenario sc = fkwc::scenario_from_json(read_file(a.scenario));
  if (g.seed || std::getenv("FKWC_SEED")) sc.seed = resolve_seed(g);
  const auto [sample, truth] = fkwc::build_scenario(sc);
  const std::filesystem::path out(a.out);
  if (out.extension() == ".csv") {
    fkwc::save_csv(sample, out);
  } else {
    fkwc::save_tensor(sample, out);
  }
  ordered_json t;
  t["n"] = truth.length();
  t["changepoints"] = truth.points();
  t["seed"] = sc.seed;
  t["scenario"] = ordered_json::parse(fkwc::scenario_to_json(sc));
  const std::string truth_path = a.truth.empty() ? a.out + ".truth.json" : a.truth;
  write_file(truth_path, t.dump(2) + "\n");
  std::cout << t.dump(2) << '\n';
  return 0;
}

struct StudyArgs {
  std::string config;
  std::string out_dir = ".";
};

int run_study(const Globals& g, const StudyArgs& a) {
  std::optional<std::uint64_t> seed;
  if (g.seed || std::getenv("FKWC_SEED")) seed = resolve_seed(g);
  const fkwc::StudyConfig cfg = fkwc::study_config_from_json(read_file(a.config), seed);
  std::filesystem::create_directories(a.out_dir);
  const std::filesystem::path dir(a.out_dir);
  ordered_json summary;
  if (cfg.power) {
    const fkwc::StudyReport rep = fkwc::run_power_study(*cfg.power);
    write_file(dir / "power.csv", rep.power_csv());
    summary["power"] = ordered_json::parse(rep.json_summary())["power"];
    if (g.output == "csv") std::cout << rep.power_csv();
  }
  if (cfg.pelt) {
    const fkwc::StudyReport rep = fkwc::run_pelt_study(*cfg.pelt);
    write_file(dir / "pelt.csv", rep.pelt_csv());
    summary["pelt"] = ordered_json::parse(rep.json_summary())["pelt"];
    if (g.output == "csv") std::cout << rep.pelt_csv();
  }
  ordered_json top;
  top["seed"] = seed ? ordered_json(*seed) : ordered_json(nullptr);
  top["config"] = a.config;
  for (auto& [k, v] : summary.items()) top[k] = v;
  write_file(dir / "summary.json", top.dump(2) + "\n");
  if (g.output == "json") std::cout << top.dump(2) << '\n';
  return 0;
}

struct CriticalArgs {
  std::size_t n = 0;
  std::size_t min_gap = 2;
  double alpha = 0.05;
  std::size_t reps = 999;
  std::string mode = "permutation";
  std::string cache;
};

int run_critical(const Globals& g, const CriticalArgs& a) {
  const std::uint64_t seed = resolve_seed(g);
  fkwc::CriticalValueTable table;
  if (!a.cache.empty()) table = fkwc::CriticalValueTable::load(a.cache);
  const double q = table.get_or_compute(a.n, a.min_gap, a.alpha, a.reps, seed, a.mode);
  if (!a.cache.empty()) table.save(a.cache);
  ordered_json j;
  j["n"] = a.n;
  j["min_gap"] = a.min_gap;
  j["alpha"] = a.alpha;
  j["reps"] = a.reps;
  j["mode"] = a.mode;
  j["seed"] = seed;
  j["critical_value"] = q;
  std::cout << j.dump(2) << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Depth-rank Kruskal-Wallis change-point detection for functional data"};
  app.require_subcommand(1);
  Globals g;
  std::uint64_t seed_value = 0;
  auto* seed_opt = app.add_option("--seed", seed_value, "Master seed (fallback: FKWC_SEED, then 0)");
  app.add_option("--threads", g.threads, "Worker threads (default: all cores)")
      ->check(CLI::NonNegativeNumber);
  app.add_option("--output", g.output, "Output format")->check(CLI::IsMember({"json", "csv"}));
  app.add_flag("--center", g.center, "Subtract the pointwise sample mean first");

  const std::vector<std::string> depths{"rp", "rp-deriv", "mfhd", "mfhd-deriv", "norm",
                                        "norm-deriv"};
  DetectArgs da;
  auto* detect = app.add_subcommand("detect", "Run a change-point test or PELT on a sample file");
  detect->add_option("input", da.input, "CSV or FKWCTEN1 file")->required();
  detect->add_option("--depth", da.depth, "Depth function")->check(CLI::IsMember(depths));
  detect->add_option("--method", da.method, "Detector")
      ->check(CLI::IsMember({"amoc", "epidemic", "pelt"}));
  detect->add_option("--lambda-prime", da.lambda_prime, "PELT penalty slope");
  detect->add_option("--lambda", da.lambda, "PELT penalty override");
  detect->add_option("--min-gap", da.min_gap, "Minimum epidemic window length");
  detect->add_option("--null", da.null_mode, "Null calibration")
      ->check(CLI::IsMember({"asymptotic", "permutation"}));
  detect->add_option("--reps", da.reps, "Permutation or Monte Carlo replicates");
  detect->add_option("--m-projections", da.projections, "Random projections for RP depths");
  detect->add_option("--basis-size", da.basis_size, "Fourier basis size for directions");
  detect->add_option("--tukey-directions", da.tukey_directions,
                     "Directions for randomized Tukey depth in 3+ dimensions");
  detect->add_flag("--header", da.header, "CSV input has a header row");

  SimulateArgs sa;
  auto* simulate = app.add_subcommand("simulate", "Generate a synthetic sample from a scenario");
  simulate->add_option("scenario", sa.scenario, "Scenario JSON")->required();
  simulate->add_option("--out", sa.out, "Sample path (.csv for CSV, else FKWCTEN1)")->required();
  simulate->add_option("--truth", sa.truth, "Truth JSON path (default: <out>.truth.json)");

  StudyArgs sta;
  auto* study = app.add_subcommand("study", "Run power and PELT studies from a config");
  study->add_option("config", sta.config, "Study JSON")->required();
  study->add_option("--out-dir", sta.out_dir, "Directory for power.csv, pelt.csv, summary.json");

  CriticalArgs ca;
  auto* critical = app.add_subcommand("critical", "Epidemic critical value with a JSON cache");
  critical->add_option("--n", ca.n, "Sample size")->required();
  critical->add_option("--min-gap", ca.min_gap, "Minimum window length");
  critical->add_option("--alpha", ca.alpha, "Level");
  critical->add_option("--reps", ca.reps, "Monte Carlo replicates");
  critical->add_option("--mode", ca.mode, "Null law")
      ->check(CLI::IsMember({"asymptotic", "permutation"}));
  critical->add_option("--cache", ca.cache, "JSON cache file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  if (*seed_opt) g.seed = seed_value;
  if (g.threads > 0) omp_set_num_threads(g.threads);

  try {
    if (*detect) return run_detect(g, da);
    if (*simulate) return run_simulate(g, sa);
    if (*study) return run_study(g, sta);
    if (*critical) return run_critical(g, ca);
  } catch (const fkwc::ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const fkwc::IoError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  }
  return 2;
}
