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

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <numbers>
#include <set>

#include "jamforge/dataset/dataset.hpp"
#include "jamforge/errors.hpp"

namespace jamforge::dataset {
namespace {

namespace fs = std::filesystem;

std::string slurp(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(is), std::istreambuf_iterator<char>()};
}

class TempDir : public ::testing::Test {
 protected:
  void SetUp() override {
    root_ = fs::temp_directory_path() /
            ("jamforge_ds_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(root_);
  }
  void TearDown() override { fs::remove_all(root_); }
  fs::path root_;
};

DatasetConfig small_config() {
  DatasetConfig cfg;
  cfg.classes = {0, 4, 8};
  cfg.jnr_grid_db = {0.0, 10.0};
  cfg.samples_per_class_per_jnr = 3;
  cfg.master_seed = 11;
  return cfg;
}

TEST(SampleSpec, PbnjBandwidthInTableRange) {
  DatasetConfig cfg;
  Rng rng(1);
  for (int i = 0; i < 1000; ++i) {
    const JammerSpec s = sample_jammer_spec(JammerKind::Pbnj, rng, cfg);
    ASSERT_GE(*s.bandwidth_hz, 1.536e6);
    ASSERT_LE(*s.bandwidth_hz, 7.68e6);
    ASSERT_GE(s.fc_hz, 0.0);
    ASSERT_LT(s.fc_hz, 15.36e6);
  }
}

TEST(SampleSpec, RepeatableForFixedSeed) {
  DatasetConfig cfg;
  for (JammerKind k : kAllJammerKinds) {
    Rng a(7), b(7);
    EXPECT_EQ(sample_jammer_spec(k, a, cfg), sample_jammer_spec(k, b, cfg));
  }
}

TEST(SampleSpec, PhaseMeanIsPi) {
  DatasetConfig cfg;
  Rng rng(3);
  const int n = 10000;
  double sum = 0.0;
  for (int i = 0; i < n; ++i) sum += sample_jammer_spec(JammerKind::Stj, rng, cfg).phase_rad;
  const double sigma = 2 * std::numbers::pi / std::sqrt(12.0 * n);
  EXPECT_NEAR(sum / n, std::numbers::pi, 3 * sigma);
}

TEST(SampleSpec, MtjAndPpnjRanges) {
  DatasetConfig cfg;
  Rng rng(5);
  for (int i = 0; i < 500; ++i) {
    const JammerSpec m = sample_jammer_spec(JammerKind::Mtj, rng, cfg);
    ASSERT_GE(m.tones.size(), 2u);
    ASSERT_LE(m.tones.size(), 5u);
    const JammerSpec p = sample_jammer_spec(JammerKind::Ppnj, rng, cfg);
    const double duty = *p.pulse_width_s / *p.pulse_period_s;
    ASSERT_GE(duty, 0.1 - 1e-12);
    ASSERT_LE(duty, 0.5 + 1e-12);
    const double periods = cfg.n / (*p.pulse_period_s * cfg.fs_hz);
    ASSERT_GE(periods, 2.0 - 1e-9);
    ASSERT_LE(periods, 8.0 + 1e-9);
  }
}

TEST(Plan, DeskCountAndBalance) {
  DatasetConfig cfg;
  EXPECT_EQ(cfg.jnr_grid_db.size(), 16u);
  const auto recs = plan_records(cfg);
  EXPECT_EQ(recs.size(), 2880u);
  EXPECT_EQ(cfg.total_samples(), 2880u);
  std::map<std::pair<int, double>, int> cells;
  std::set<std::uint64_t> seeds;
  for (const auto& r : recs) {
    ++cells[{r.class_id, r.jnr_db}];
    seeds.insert(r.seed);
  }
  for (const auto& [k, v] : cells) EXPECT_EQ(v, 20);
  EXPECT_EQ(seeds.size(), recs.size());
}

TEST(Config, RejectsInvalid) {
  DatasetConfig cfg;
  cfg.samples_per_class_per_jnr = 0;
  EXPECT_THROW(cfg.validate(), InvalidArgument);
  cfg = DatasetConfig{};
  cfg.jnr_grid_db.clear();
  EXPECT_THROW(cfg.validate(), InvalidArgument);
}

TEST_F(TempDir, GenerationIsByteIdenticalAcrossRunsAndThreads) {
  const DatasetConfig cfg = small_config();
  const DatasetManifest a = generate_dataset(cfg, root_ / "a", 1);
  generate_dataset(cfg, root_ / "b", 4);
  EXPECT_EQ(slurp(root_ / "a" / kPayloadFile), slurp(root_ / "b" / kPayloadFile));
  EXPECT_EQ(slurp(root_ / "a" / kManifestFile), slurp(root_ / "b" / kManifestFile));
  EXPECT_EQ(a.records.size(), 18u);
  for (const auto& r : a.records) {
    EXPECT_EQ(class_id_for(r.spec.first.kind, r.spec.second.kind), r.class_id);
    EXPECT_EQ(r.offset, payload_offset(r.index));
  }
}

TEST_F(TempDir, LoadRoundTripAndRegeneration) {
  const DatasetConfig cfg = small_config();
  generate_dataset(cfg, root_ / "a", 1);
  const Dataset d = load_dataset(root_ / "a");
  ASSERT_EQ(d.size(), 18u);
  save_dataset(d, root_ / "b");
  const Dataset e = load_dataset(root_ / "b");
  EXPECT_EQ(d.pixels, e.pixels);
  EXPECT_EQ(d.labels, e.labels);
  EXPECT_EQ(slurp(root_ / "a" / kPayloadFile), slurp(root_ / "b" / kPayloadFile));

  // Any record regenerates its stored pixels.
  SampleRecord rec = d.manifest.records[7];
  const tf::Spectrogram s = generate_sample(cfg, rec);
  const auto stored = d.image(7);
  EXPECT_TRUE(std::equal(s.pixels.begin(), s.pixels.end(), stored.begin()));
}

TEST_F(TempDir, TruncatedPayloadIsFormatError) {
  generate_dataset(small_config(), root_, 1);
  const fs::path payload = root_ / kPayloadFile;
  fs::resize_file(payload, fs::file_size(payload) - 100);
  EXPECT_THROW(load_dataset(root_), FormatError);
}

TEST_F(TempDir, WrongMagicNamesExpectedMagic) {
  generate_dataset(small_config(), root_, 1);
  {
    std::fstream f(root_ / kPayloadFile, std::ios::binary | std::ios::in | std::ios::out);
    f.write("XXXX", 4);
  }
  try {
    load_dataset(root_);
    FAIL() << "expected FormatError";
  } catch (const FormatError& e) {
    EXPECT_NE(std::string(e.what()).find("JSD1"), std::string::npos);
    EXPECT_EQ(e.offset(), 0u);
  }
}

TEST(Split, EightTwoPerCell) {
  DatasetConfig cfg = small_config();
  cfg.samples_per_class_per_jnr = 10;
  DatasetManifest m;
  m.config = cfg;
  m.records = plan_records(cfg);
  const Split s = split_dataset(m, 0.8, 3);
  EXPECT_EQ(s.train.size(), 48u);
  EXPECT_EQ(s.test.size(), 12u);
  std::map<std::pair<int, double>, int> test_cells;
  for (std::size_t i : s.test) ++test_cells[{m.records[i].class_id, m.records[i].jnr_db}];
  for (const auto& [k, v] : test_cells) EXPECT_EQ(v, 2);

  std::set<std::size_t> all(s.train.begin(), s.train.end());
  for (std::size_t i : s.test) EXPECT_TRUE(all.insert(i).second);
  EXPECT_EQ(all.size(), m.records.size());

  const Split again = split_dataset(m, 0.8, 3);
  EXPECT_EQ(again.train, s.train);
  EXPECT_NE(split_dataset(m, 0.8, 4).train, s.train);
}

TEST(Split, RejectsTinyCellsAndBadFraction) {
  DatasetConfig cfg = small_config();
  cfg.samples_per_class_per_jnr = 1;
  DatasetManifest m;
  m.records = plan_records(cfg);
  EXPECT_THROW(split_dataset(m, 0.8, 1), InvalidArgument);
  cfg.samples_per_class_per_jnr = 4;
  m.records = plan_records(cfg);
  EXPECT_THROW(split_dataset(m, 1.0, 1), InvalidArgument);
}

}  // namespace
}  // namespace jamforge::dataset
