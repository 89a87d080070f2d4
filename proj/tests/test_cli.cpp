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

#include <gtest/gtest.h>
#include <sys/wait.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>

#include "fkwc/eval.hpp"
#include "fkwc/io.hpp"
#include "json.hpp"

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct CliRun {
  int code = -1;
  std::string out;
  std::string err;
};

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("fkwc_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  CliRun run(const std::string& args, const std::string& env = "") {
    const fs::path err = dir_ / "stderr.txt";
    const std::string cmd = env + " " + FKWC_CLI_PATH + " " + args + " 2>" + err.string();
    CliRun r;
    FILE* pipe = popen(cmd.c_str(), "r");
    std::array<char, 4096> buf{};
    std::size_t got;
    while ((got = fread(buf.data(), 1, buf.size(), pipe)) > 0) r.out.append(buf.data(), got);
    const int status = pclose(pipe);
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    std::ifstream in(err);
    std::ostringstream os;
    os << in.rdbuf();
    r.err = os.str();
    return r;
  }

  fs::path write(const std::string& name, const std::string& body) {
    const fs::path p = dir_ / name;
    std::ofstream(p) << body;
    return p;
  }

  std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
  }

  fs::path dir_;
};

const char* kAmoc200 = R"({"n": 200, "grid_points": 50, "distribution": "gauss",
  "layout": "amoc", "seed": 3, "segments": [{"alpha": 0.2, "beta": 1}, {"alpha": 0.2, "beta": 3}]})";

TEST_F(Cli, InvalidDepthExitsTwoAndNamesChoices) {
  const auto p = write("x.csv", "1,2\n3,4\n");
  const auto r = run("detect " + p.string() + " --depth simplicial");
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("mfhd-deriv"), std::string::npos) << r.err;
  EXPECT_EQ(run("detect " + p.string() + " --bogus-flag").code, 2);
  EXPECT_EQ(run("").code, 2);
}

TEST_F(Cli, MissingInputExitsThree) {
  EXPECT_EQ(run("detect " + (dir_ / "nope.csv").string()).code, 3);
  const auto bad = write("bad.csv", "1,2\n3\n");
  const auto r = run("detect " + bad.string());
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("ragged row at line 2"), std::string::npos) << r.err;
}

TEST_F(Cli, SimulateAmocTruthAndDeterminism) {
  const auto sc = write("amoc.json", kAmoc200);
  const auto a = run("simulate " + sc.string() + " --out " + (dir_ / "a.bin").string());
  ASSERT_EQ(a.code, 0) << a.err;
  const auto truth = json::parse(slurp(dir_ / "a.bin.truth.json"));
  EXPECT_EQ(truth["changepoints"], json::array({100}));
  EXPECT_EQ(truth["seed"], 3);
  ASSERT_EQ(run("simulate " + sc.string() + " --out " + (dir_ / "b.bin").string()).code, 0);
  EXPECT_EQ(slurp(dir_ / "a.bin"), slurp(dir_ / "b.bin"));
  EXPECT_EQ(fkwc::load_tensor(dir_ / "a.bin").size(), 200u);
  ASSERT_EQ(run("simulate " + sc.string() + " --out " + (dir_ / "c.csv").string()).code, 0);
  EXPECT_EQ(fkwc::load_csv(dir_ / "c.csv", false).size(), 200u);
  // --seed overrides the scenario seed.
  ASSERT_EQ(run("--seed 4 simulate " + sc.string() + " --out " + (dir_ / "d.bin").string()).code, 0);
  EXPECT_NE(slurp(dir_ / "a.bin"), slurp(dir_ / "d.bin"));
}

TEST_F(Cli, SimulateValidation) {
  const auto bad = write("bad.json", R"({"n": 200, "layout": "amoc",
    "segments": [{"beta": 1, "length": 50}, {"beta": 3, "length": 100}]})");
  EXPECT_EQ(run("simulate " + bad.string() + " --out " + (dir_ / "x.bin").string()).code, 2);
  const auto junk = write("junk.json", "{");
  EXPECT_EQ(run("simulate " + junk.string() + " --out " + (dir_ / "x.bin").string()).code, 2);
  EXPECT_EQ(run("simulate " + (dir_ / "missing.json").string() + " --out x.bin").code, 3);
}

TEST_F(Cli, DetectPeltFindsFivePlantedChanges) {
  const auto sc = write("five.json", R"({"n": 500, "grid_points": 100, "layout": "five-alternating",
    "seed": 21, "segments": [{"beta": 1}, {"beta": 3}, {"beta": 1}, {"beta": 3}, {"beta": 1}, {"beta": 3}]})");
  ASSERT_EQ(run("simulate " + sc.string() + " --out " + (dir_ / "f.bin").string()).code, 0);
  const auto truth = json::parse(slurp(dir_ / "f.bin.truth.json"))["changepoints"];
  const auto r = run("--seed 1 detect " + (dir_ / "f.bin").string() +
                     " --method pelt --depth rp-deriv --lambda-prime 0.3");
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = json::parse(r.out);
  EXPECT_EQ(j["method"], "pelt");
  EXPECT_EQ(j["depth"], "rp-deriv");
  EXPECT_EQ(j["seed"], 1);
  EXPECT_EQ(j["n"], 500);
  EXPECT_FALSE(j.contains("p_value"));
  const auto cps = j["changepoints"];
  ASSERT_EQ(cps.size(), 5u) << r.out;
  for (std::size_t i = 0; i < 5; ++i) {
    EXPECT_LE(std::abs(cps[i].get<int>() - truth[i].get<int>()), 10);
  }
}

TEST_F(Cli, DetectAmocOnNoiseIsCalibrated) {
  std::mt19937_64 eng(5);
  std::normal_distribution<double> z;
  int above = 0;
  const int files = 20;
  for (int f = 0; f < files; ++f) {
    std::ostringstream os;
    for (int i = 0; i < 80; ++i) {
      for (int p = 0; p < 20; ++p) os << (p ? "," : "") << z(eng);
      os << '\n';
    }
    const auto path = write("noise" + std::to_string(f) + ".csv", os.str());
    const auto r = run("--seed " + std::to_string(f) + " detect " + path.string() +
                       " --method amoc --depth mfhd --reps 199");
    ASSERT_EQ(r.code, 0) << r.err;
    above += json::parse(r.out)["p_value"].get<double>() > 0.05;
  }
  EXPECT_GE(above, 0.9 * files);
}

TEST_F(Cli, SeedFallbackThreadsAndCsv) {
  const auto sc = write("amoc.json", kAmoc200);
  ASSERT_EQ(run("simulate " + sc.string() + " --out " + (dir_ / "a.bin").string()).code, 0);
  const std::string in = (dir_ / "a.bin").string();
  const auto env = run("detect " + in + " --depth rp --method epidemic --reps 99", "FKWC_SEED=77");
  ASSERT_EQ(env.code, 0) << env.err;
  EXPECT_EQ(json::parse(env.out)["seed"], 77);
  const auto flag = run("--seed 77 detect " + in + " --depth rp --method epidemic --reps 99");
  EXPECT_EQ(env.out, flag.out);
  const auto t1 = run("--threads 1 --seed 9 detect " + in + " --depth mfhd-deriv --reps 99");
  const auto t3 = run("--threads 3 --seed 9 detect " + in + " --depth mfhd-deriv --reps 99");
  EXPECT_EQ(t1.out, t3.out);
  const auto csv = run("--output csv --seed 9 detect " + in + " --depth norm --method amoc");
  ASSERT_EQ(csv.code, 0);
  EXPECT_EQ(csv.out.rfind("method,depth,statistic,p_value,changepoints,n,seed\namoc,norm,", 0), 0u)
      << csv.out;
  EXPECT_EQ(run("detect " + in, "FKWC_SEED=abc").code, 2);
  EXPECT_EQ(run("--output xml detect " + in).code, 2);
}

TEST_F(Cli, StudyWritesReportsAndRejectsEmpty) {
  const auto cfg = write("study.json", R"({
    "seed": 2,
    "power": {"reps": 4, "null_reps": 19,
      "scenarios": [{"name": "s", "effect": "beta 1->3",
        "scenario": {"n": 40, "grid_points": 30, "layout": "amoc", "segments": [{"beta": 1}, {"beta": 3}]}}],
      "methods": [{"depth": "mfhd", "detector": "epidemic"}]},
    "pelt": {"reps": 3, "lambda_primes": [0.2, 0.3], "depths": ["norm"],
      "scenarios": [{"name": "p",
        "scenario": {"n": 40, "grid_points": 30, "layout": "none", "segments": [{}]}}]}
  })");
  const auto out = dir_ / "out";
  const auto r = run("study " + cfg.string() + " --out-dir " + out.string());
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(fs::exists(out / "power.csv"));
  EXPECT_TRUE(fs::exists(out / "pelt.csv"));
  const auto summary = json::parse(slurp(out / "summary.json"));
  EXPECT_EQ(summary["power"].size(), 1u);
  EXPECT_EQ(summary["pelt"].size(), 2u);
  const auto first = slurp(out / "power.csv");
  ASSERT_EQ(run("study " + cfg.string() + " --out-dir " + out.string()).code, 0);
  EXPECT_EQ(first, slurp(out / "power.csv"));
  const auto empty = write("empty.json", R"({"power": {"scenarios": [], "methods": []}})");
  EXPECT_EQ(run("study " + empty.string() + " --out-dir " + out.string()).code, 2);
}

TEST_F(Cli, BundledConfigsParse) {
  for (const char* name : {"epidemic-power-desk.json", "lambda-sweep.json"}) {
    const fs::path p = fs::path(FKWC_CONFIG_DIR) / name;
    ASSERT_TRUE(fs::exists(p)) << p;
    EXPECT_NO_THROW(fkwc::study_config_from_json(slurp(p), std::nullopt)) << p;
  }
}

TEST_F(Cli, CriticalValueCache) {
  const auto cache = dir_ / "crit.json";
  const auto a = run("--seed 3 critical --n 50 --min-gap 5 --reps 99 --cache " + cache.string());
  ASSERT_EQ(a.code, 0) << a.err;
  const auto b = run("--seed 3 critical --n 50 --min-gap 5 --reps 99 --cache " + cache.string());
  EXPECT_EQ(a.out, b.out);
  EXPECT_EQ(json::parse(slurp(cache))["entries"].size(), 1u);
}

}  // namespace
