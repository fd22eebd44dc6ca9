// Copyright 2026 The hetnoma Authors
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
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
#include <sstream>
#include <string>

#include "json.hpp"

namespace {

namespace fs = std::filesystem;

struct Result {
  int code = -1;
  std::string output;  // stdout and stderr
};

Result run(const std::string& args) {
  const std::string cmd = std::string(HETNOMA_CLI_PATH) + " " + args + " 2>&1";
  Result r;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (pipe == nullptr) return r;
  std::array<char, 4096> buf{};
  std::size_t n = 0;
  while ((n = fread(buf.data(), 1, buf.size(), pipe)) > 0) r.output.append(buf.data(), n);
  const int status = pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string slurp(const fs::path& p) {
  std::ifstream is(p);
  std::stringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
    dir_ = fs::temp_directory_path() / (std::string("hetnoma_cli_") + info->name());
    fs::remove_all(dir_);
    fs::create_directories(dir_);
    auto cfg = nlohmann::json::parse(slurp(HETNOMA_DEFAULTS_PATH));
    cfg["num_ues"] = 24;
    cfg["num_sbs"] = 3;
    small_ = dir_ / "small.json";
    std::ofstream(small_) << cfg.dump(2);
  }
  void TearDown() override { fs::remove_all(dir_); }

  fs::path dir_;
  fs::path small_;
};

TEST_F(Cli, SimulateDefaultsWritesFourFiles) {
  const auto out = dir_ / "run";
  const auto r = run("simulate --config " + std::string(HETNOMA_DEFAULTS_PATH) + " --out " +
                     out.string());
  ASSERT_EQ(r.code, 0) << r.output;
  for (const char* f : {"scenario.json", "report.json", "rates.csv", "trace.csv"}) {
    EXPECT_TRUE(fs::exists(out / f)) << f;
  }
  const auto rep = nlohmann::json::parse(slurp(out / "report.json"));
  EXPECT_GT(rep.at("sumrate_bps").get<double>(), 0.0);
  EXPECT_EQ(rep.at("num_ues").get<int>(), 100);
}

TEST_F(Cli, OutputsCarryProvenance) {
  const auto out = dir_ / "run";
  ASSERT_EQ(run("simulate --config " + small_.string() + " --seed 7 --out " + out.string()).code,
            0);
  for (const char* f : {"rates.csv", "trace.csv"}) {
    const auto text = slurp(out / f);
    EXPECT_EQ(text.rfind("# hetnoma config_hash=", 0), 0u) << f;
    EXPECT_NE(text.find(" seed=7\n"), std::string::npos) << f;
  }
  for (const char* f : {"scenario.json", "report.json"}) {
    const auto j = nlohmann::json::parse(slurp(out / f));
    EXPECT_TRUE(j.contains("config_hash")) << f;
    EXPECT_EQ(j.at("seed").get<int>(), 7) << f;
  }
}

TEST_F(Cli, SchemeOmaUsesSingletons) {
  const auto out = dir_ / "oma";
  ASSERT_EQ(
      run("simulate --config " + small_.string() + " --scheme oma --out " + out.string()).code,
      0);
  const auto rep = nlohmann::json::parse(slurp(out / "report.json"));
  EXPECT_EQ(rep.at("scheme"), "oma");
  for (const auto& c : rep.at("clusters")) EXPECT_EQ(c.at("members").size(), 1u);
}

TEST_F(Cli, DeterministicUnderFixedSeed) {
  const auto a = dir_ / "a", b = dir_ / "b";
  ASSERT_EQ(run("simulate --config " + small_.string() + " --seed 3 --out " + a.string()).code, 0);
  ASSERT_EQ(run("simulate --config " + small_.string() + " --seed 3 --out " + b.string()).code, 0);
  for (const char* f : {"scenario.json", "rates.csv", "trace.csv"}) {
    EXPECT_EQ(slurp(a / f), slurp(b / f)) << f;
  }
}

TEST_F(Cli, MissingConfigFieldIsUsageError) {
  auto cfg = nlohmann::json::parse(slurp(small_));
  cfg.erase("bias");
  const auto broken = dir_ / "broken.json";
  std::ofstream(broken) << cfg.dump();
  const auto r = run("simulate --config " + broken.string() + " --out " + (dir_ / "x").string());
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.output.find("bias"), std::string::npos) << r.output;
}

TEST_F(Cli, MissingConfigOptionIsUsageError) {
  EXPECT_EQ(run("simulate").code, 2);
  EXPECT_EQ(run("simulate --config " + (dir_ / "nope.json").string()).code, 2);
}

TEST_F(Cli, UnknownAxisIsUsageError) {
  const auto r = run("sweep --config " + small_.string() + " --axis gamma --values 1");
  EXPECT_EQ(r.code, 2);
}

TEST_F(Cli, SweepWritesCsv) {
  const auto out = dir_ / "sweep.csv";
  const auto r = run("sweep --config " + small_.string() +
                     " --axis epsilon --values 0,1e-3 --seeds 2 --schemes equal --out " +
                     out.string());
  ASSERT_EQ(r.code, 0) << r.output;
  const auto text = slurp(out);
  EXPECT_NE(text.find("epsilon,0.001,mean,equal"), std::string::npos) << text;
}

TEST_F(Cli, GenerateWritesScenarioAndClusters) {
  const auto out = dir_ / "gen";
  ASSERT_EQ(run("generate --config " + small_.string() + " --out " + out.string()).code, 0);
  EXPECT_TRUE(fs::exists(out / "scenario.json"));
  EXPECT_TRUE(fs::exists(out / "clusters.csv"));
}

TEST_F(Cli, VerifyWithoutInstancesIsVacuous) {
  const auto r = run("verify --instances 0");
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.output.find("vacuous"), std::string::npos) << r.output;
}

TEST_F(Cli, VerifyDetectsInjectedPsiFlip) {
  const auto r = run("verify --instances 6 --inject-psi-flip");
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.output.find("closed_form_vs_linear"), std::string::npos) << r.output;
}

}  // namespace
