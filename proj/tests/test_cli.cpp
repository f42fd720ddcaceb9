// Copyright 2026 The jamforge Authors.
//
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

#include <filesystem>
#include <fstream>
#include <iterator>
#include <sstream>
#include <string>
#include <vector>

#include "jamforge/acsnet/acsnet.hpp"
#include "jamforge/cli/cli.hpp"
#include "jamforge/nn/checkpoint.hpp"

namespace jamforge::cli {
namespace {

namespace fs = std::filesystem;

std::string slurp(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(is), std::istreambuf_iterator<char>()};
}

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result invoke(std::vector<std::string> args) {
  args.insert(args.begin(), "jamforge");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::size_t count_lines(const std::string& s) { return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n')); }

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    root_ = fs::temp_directory_path() /
            ("jamforge_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(root_);
    fs::create_directories(root_);
  }
  void TearDown() override { fs::remove_all(root_); }
  std::string path(const std::string& leaf) const { return (root_ / leaf).string(); }

  /// 3 classes x 1 JNR x 4 samples; enough for a stratified split.
  void make_dataset(const std::string& leaf) {
    const Result r = invoke({"gen-dataset", "--out", path(leaf), "--classes", "0", "4", "7", "--jnr", "10",
                             "--samples", "4", "--seed", "3"});
    ASSERT_EQ(r.code, kExitOk) << r.err;
  }
  fs::path root_;
};

TEST_F(CliTest, SpectrogramIsReproducible) {
  const Result a = invoke({"spectrogram", "--class", "4", "--jnr", "5", "--seed", "9", "--out", path("a")});
  ASSERT_EQ(a.code, kExitOk) << a.err;
  const Result b = invoke({"spectrogram", "--class", "4", "--jnr", "5", "--seed", "9", "--out", path("b")});
  ASSERT_EQ(b.code, kExitOk) << b.err;
  for (const char* f : {"spectrogram.pgm", "spectrogram.f32", "spectrogram.json"}) {
    EXPECT_EQ(slurp(root_ / "a" / f), slurp(root_ / "b" / f)) << f;
  }
  const std::string pgm = slurp(root_ / "a" / "spectrogram.pgm");
  EXPECT_EQ(pgm.substr(0, 15), "P5\n128 128\n255\n");
  EXPECT_EQ(pgm.size(), 15u + 128 * 128);
  EXPECT_EQ(fs::file_size(root_ / "a" / "spectrogram.f32"), 4u * 128 * 128);
  EXPECT_TRUE(fs::exists(root_ / "a" / "run_manifest.json"));
  EXPECT_NE(a.out.find("# resolved configuration"), std::string::npos);
  EXPECT_NE(a.out.find("class=4"), std::string::npos);
}

TEST_F(CliTest, ClassOutOfRangeIsUsageError) {
  const Result r = invoke({"spectrogram", "--class", "9", "--out", path("x")});
  EXPECT_EQ(r.code, kExitUsage);
  EXPECT_FALSE(fs::exists(root_ / "x"));
}

TEST_F(CliTest, MissingSubcommandIsUsageError) { EXPECT_EQ(invoke({}).code, kExitUsage); }

TEST_F(CliTest, HelpExitsZero) { EXPECT_EQ(invoke({"--help"}).code, kExitOk); }

TEST_F(CliTest, GenDatasetRefusesExistingOutput) {
  make_dataset("ds");
  EXPECT_TRUE(fs::exists(root_ / "ds" / "payload.jsd"));
  EXPECT_TRUE(fs::exists(root_ / "ds" / "run_manifest.json"));
  const Result again = invoke({"gen-dataset", "--out", path("ds"), "--samples", "2"});
  EXPECT_EQ(again.code, kExitIo);
  EXPECT_NE(again.err.find("--force"), std::string::npos) << again.err;
}

TEST_F(CliTest, FlopsMatchesModelCount) {
  const Result r = invoke({"flops", "--preset", "desk"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  nn::Model<float> m = acsnet::build_acsnet(acsnet::AcsnetConfig::desk(), 1);
  EXPECT_NE(r.out.find("params " + std::to_string(nn::count_params(m))), std::string::npos) << r.out;
  EXPECT_NE(r.out.find("flops 173065335"), std::string::npos) << r.out;
}

TEST_F(CliTest, TrainZeroEpochsKeepsInitialization) {
  make_dataset("ds");
  const Result r = invoke({"train", "--dataset", path("ds"), "--epochs", "0", "--seed", "5", "--out-model",
                           path("m.acs")});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  nn::Checkpoint ck = nn::load_checkpoint(root_ / "m.acs");
  nn::Model<float> init = acsnet::build_acsnet(acsnet::AcsnetConfig::desk(), 5);
  const auto a = ck.model.parameters(), b = init.parameters();
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_EQ(*a[i].value, *b[i].value) << a[i].name;
  EXPECT_EQ(count_lines(slurp(root_ / "trace.csv")), 1u);  // header only
}

TEST_F(CliTest, EvalWritesReports) {
  make_dataset("ds");
  ASSERT_EQ(invoke({"train", "--dataset", path("ds"), "--epochs", "1", "--batch-size", "4", "--out-model",
                    path("m.acs")})
                .code,
            kExitOk);
  const Result r = invoke({"eval", "--model", path("m.acs"), "--dataset", path("ds"), "--out-dir", path("ev"),
                           "--timing-runs", "0"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  for (const char* f : {"confusion.csv", "metrics.csv", "per_jnr.csv", "per_pr.csv", "run_manifest.json"}) {
    EXPECT_TRUE(fs::exists(root_ / "ev" / f)) << f;
  }
  // 4 samples per cell at fraction 0.8 -> 1 test sample per class.
  std::istringstream conf(slurp(root_ / "ev" / "confusion.csv"));
  std::string line;
  std::getline(conf, line);
  std::uint64_t total = 0;
  for (int row = 0; std::getline(conf, line); ++row) {
    std::uint64_t s = 0;
    std::istringstream cells(line);
    std::string cell;
    std::getline(cells, cell, ',');
    while (std::getline(cells, cell, ',')) s += std::stoull(cell);
    EXPECT_EQ(s, (row == 0 || row == 4 || row == 7) ? 1u : 0u) << "row " << row;
    total += s;
  }
  EXPECT_EQ(total, 3u);
  EXPECT_EQ(count_lines(slurp(root_ / "ev" / "per_jnr.csv")), 2u);

  // Without timing the reports are reproducible.
  const std::string metrics = slurp(root_ / "ev" / "metrics.csv");
  ASSERT_EQ(invoke({"eval", "--model", path("m.acs"), "--dataset", path("ds"), "--out-dir", path("ev2"),
                    "--timing-runs", "0"})
                .code,
            kExitOk);
  EXPECT_EQ(slurp(root_ / "ev2" / "metrics.csv"), metrics);
}

TEST_F(CliTest, MissingInputNamesPath) {
  const Result r = invoke({"eval", "--model", path("nope.acs"), "--dataset", path("ds"), "--out-dir", path("ev")});
  EXPECT_EQ(r.code, kExitIo);
  EXPECT_NE(r.err.find("nope.acs"), std::string::npos) << r.err;
}

TEST_F(CliTest, ConfigFileDrivesSubcommand) {
  {
    std::ofstream ini(path("run.ini"));
    ini << "[spectrogram]\nclass = 2\nout = " << path("cfg") << "\n";
  }
  const Result r = invoke({"--config", path("run.ini"), "spectrogram"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  EXPECT_TRUE(fs::exists(root_ / "cfg" / "spectrogram.pgm"));
}

TEST_F(CliTest, UnknownConfigKeyIsUsageError) {
  {
    std::ofstream ini(path("bad.ini"));
    ini << "[spectrogram]\nclass = 2\nbogus = 1\nout = " << path("cfg") << "\n";
  }
  EXPECT_EQ(invoke({"--config", path("bad.ini"), "spectrogram"}).code, kExitUsage);
}

}  // namespace
}  // namespace jamforge::cli
