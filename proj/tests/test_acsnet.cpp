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
#include <numeric>

#include "jamforge/acsnet/acsnet.hpp"
#include "jamforge/errors.hpp"
#include "support/fixtures.hpp"
#include "support/oracles.hpp"

namespace jamforge::acsnet {
namespace {

namespace fs = std::filesystem;

std::vector<std::vector<float>> parameter_values(nn::Model<float>& m) {
  std::vector<std::vector<float>> out;
  for (const auto& p : m.parameters()) out.emplace_back(p.value->values().begin(), p.value->values().end());
  return out;
}

std::string slurp(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(is), std::istreambuf_iterator<char>()};
}

TEST(Presets, ParameterCountsAndOutputShape) {
  nn::Model<float> desk = build_acsnet(AcsnetConfig::desk(), 1);
  EXPECT_EQ(nn::count_params(desk), 125673u);
  nn::Model<float> paper = build_acsnet(AcsnetConfig::paper(), 1);
  const std::uint64_t p = nn::count_params(paper);
  EXPECT_GE(p, 1500000u);
  EXPECT_LE(p, 1900000u);
  EXPECT_EQ(desk.output_shape(input_shape(AcsnetConfig::desk())), (nn::Shape{1, 9}));
  EXPECT_EQ(paper.output_shape(input_shape(AcsnetConfig::paper(), 3)), (nn::Shape{3, 9}));
}

TEST(Presets, NamesRoundTrip) {
  EXPECT_EQ(preset_from_string("desk"), Preset::Desk);
  EXPECT_EQ(preset_from_string(to_string(Preset::Paper)), Preset::Paper);
  EXPECT_THROW(preset_from_string("huge"), InvalidArgument);
}

TEST(Presets, SameSeedSameWeights) {
  nn::Model<float> a = build_acsnet(AcsnetConfig::desk(), 9);
  nn::Model<float> b = build_acsnet(AcsnetConfig::desk(), 9);
  nn::Model<float> c = build_acsnet(AcsnetConfig::desk(), 10);
  EXPECT_EQ(parameter_values(a), parameter_values(b));
  EXPECT_NE(parameter_values(a), parameter_values(c));
}

TEST(Presets, FusedTwinMatchesLogits) {
  nn::Model<float> m = build_acsnet(AcsnetConfig::desk(), 2);
  Rng rng(5);
  nn::Tensor<float> x(input_shape(AcsnetConfig::desk(), 4));
  for (std::size_t i = 0; i < x.size(); ++i) x[i] = static_cast<float>(rng.uniform());
  m.forward(x);  // non-trivial running statistics
  m.set_mode(nn::Mode::Eval);
  nn::Model<float> f = nn::fuse_acbs(m);
  const nn::Tensor<float> a = m.forward(x), b = f.forward(x);
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_NEAR(a[i], b[i], 1e-3f);
}

ConfusionMatrix from_pairs(const std::vector<std::pair<int, int>>& pairs) {
  ConfusionMatrix m{};
  for (const auto& [t, p] : pairs) ++m[static_cast<std::size_t>(t)][static_cast<std::size_t>(p)];
  return m;
}

TEST(Metrics, KappaMatchesBruteForce) {
  Rng rng(21);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<std::pair<int, int>> pairs;
    const auto n = rng.uniform_int(1, 400);
    for (std::int64_t i = 0; i < n; ++i) {
      const int t = static_cast<int>(rng.uniform_int(0, 8));
      const int p = rng.uniform() < 0.6 ? t : static_cast<int>(rng.uniform_int(0, 8));
      pairs.emplace_back(t, p);
    }
    const ConfusionMatrix m = from_pairs(pairs);
    const oracle::Agreement ref = oracle::agreement_from_pairs(pairs, kNumClasses);
    EXPECT_NEAR(overall_accuracy(m), ref.oa, 1e-12);
    EXPECT_NEAR(chance_agreement(m), ref.pe, 1e-12);
    EXPECT_NEAR(kappa(m), ref.kappa, 1e-12);
  }
}

TEST(Metrics, HandExample) {
  ConfusionMatrix m{};
  m[0][0] = 40;
  m[0][1] = 10;
  m[1][0] = 20;
  m[1][1] = 30;
  EXPECT_DOUBLE_EQ(overall_accuracy(m), 0.7);
  EXPECT_DOUBLE_EQ(chance_agreement(m), 0.5);
  EXPECT_NEAR(kappa(m), 0.4, 1e-12);
}

TEST(Metrics, UniformAndPerfect) {
  ConfusionMatrix u{};
  for (auto& row : u) row.fill(5);
  EXPECT_NEAR(kappa(u), 0.0, 1e-12);
  ConfusionMatrix d{};
  for (std::size_t i = 0; i < d.size(); ++i) d[i][i] = 3;
  EXPECT_DOUBLE_EQ(overall_accuracy(d), 1.0);
  EXPECT_DOUBLE_EQ(kappa(d), 1.0);
  ConfusionMatrix one{};
  one[2][2] = 10;  // p_e = 1
  EXPECT_DOUBLE_EQ(kappa(one), 1.0);
  EXPECT_EQ(overall_accuracy(ConfusionMatrix{}), 0.0);
}

TEST(Metrics, ArgmaxTiesPickLowestIndex) {
  const std::vector<float> v = {0.1f, 0.7f, 0.7f, 0.2f};
  EXPECT_EQ(argmax(v), 1);
  EXPECT_THROW(argmax(std::span<const float>{}), InvalidArgument);
}

class Toy : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    data_ = new dataset::Dataset(fixture::build_dataset(fixture::toy_config({6, 8}, {10.0}, 40, 3)));
    split_ = new dataset::Split(dataset::split_dataset(data_->manifest, 0.8, 1));
  }
  static void TearDownTestSuite() {
    delete data_;
    delete split_;
  }
  static dataset::Dataset* data_;
  static dataset::Split* split_;
};
dataset::Dataset* Toy::data_ = nullptr;
dataset::Split* Toy::split_ = nullptr;

TEST_F(Toy, ZeroLearningRateKeepsParameters) {
  nn::Model<float> m = build_acsnet(AcsnetConfig::desk(), 1);
  const auto before = parameter_values(m);
  TrainConfig tc;
  tc.lr = 0.0;
  tc.epochs = 2;
  tc.batch_size = static_cast<int>(split_->train.size());  // one batch: same statistics every epoch
  tc.track_test_oa = false;
  const TrainResult r = train(m, *data_, *split_, tc);
  EXPECT_EQ(parameter_values(m), before);
  ASSERT_EQ(r.trace.size(), 2u);
  EXPECT_NEAR(r.trace[0].train_loss, r.trace[1].train_loss, 1e-6);
}

TEST_F(Toy, LossDecreasesOnTwoClasses) {
  nn::Model<float> m = build_acsnet(AcsnetConfig::desk(), 1);
  TrainConfig tc;
  tc.epochs = 5;
  tc.track_test_oa = false;
  const TrainResult r = train(m, *data_, *split_, tc);
  ASSERT_EQ(r.trace.size(), 5u);
  for (std::size_t e = 1; e < r.trace.size(); ++e) {
    EXPECT_LT(r.trace[e].train_loss, r.trace[e - 1].train_loss) << "epoch " << e + 1;
  }
}

TEST_F(Toy, TrainingIsDeterministic) {
  TrainConfig tc;
  tc.epochs = 1;
  tc.batch_size = 16;
  nn::Model<float> a = build_acsnet(AcsnetConfig::desk(), 4);
  nn::Model<float> b = build_acsnet(AcsnetConfig::desk(), 4);
  const TrainResult ra = train(a, *data_, *split_, tc);
  const TrainResult rb = train(b, *data_, *split_, tc);
  EXPECT_EQ(parameter_values(a), parameter_values(b));
  EXPECT_EQ(ra.trace[0].train_loss, rb.trace[0].train_loss);
  EXPECT_EQ(ra.trace[0].test_oa, rb.trace[0].test_oa);
}

TEST_F(Toy, EpochsZeroIsNoOp) {
  nn::Model<float> m = build_acsnet(AcsnetConfig::desk(), 1);
  const auto before = parameter_values(m);
  TrainConfig tc;
  tc.epochs = 0;
  EXPECT_TRUE(train(m, *data_, *split_, tc).trace.empty());
  EXPECT_EQ(parameter_values(m), before);
}

TEST(Train, RejectsBadConfig) {
  TrainConfig tc;
  tc.batch_size = 0;
  EXPECT_THROW(tc.validate(), InvalidArgument);
  tc = TrainConfig{};
  tc.lr = -1.0;
  EXPECT_THROW(tc.validate(), InvalidArgument);
}

class SmallEval : public ::testing::Test {
 protected:
  void SetUp() override {
    dataset::DatasetConfig cfg = fixture::toy_config({0, 3, 5}, {0.0, 10.0}, 2, 5);
    cfg.pr_db = {-5.0, 0.0};
    data_ = fixture::build_dataset(cfg);
    model_ = build_acsnet(AcsnetConfig::desk(), 6);
    model_.set_mode(nn::Mode::Eval);
    all_.resize(data_.size());
    std::iota(all_.begin(), all_.end(), std::size_t{0});
  }
  dataset::Dataset data_;
  nn::Model<float> model_;
  std::vector<std::size_t> all_;
};

TEST_F(SmallEval, GroupsAverageToOverall) {
  const EvalReport r = evaluate(model_, data_, all_);
  EXPECT_EQ(r.total(), data_.size());
  for (const auto* groups : {&r.per_jnr, &r.per_pr}) {
    ASSERT_EQ(groups->size(), 2u);
    double weighted = 0.0;
    std::uint64_t n = 0;
    for (const auto& [k, g] : *groups) {
      weighted += g.oa() * static_cast<double>(g.total);
      n += g.total;
    }
    EXPECT_EQ(n, data_.size());
    EXPECT_NEAR(weighted / static_cast<double>(n), r.oa, 1e-12);
  }
  for (std::size_t i = 0; i < r.confusion.size(); ++i) {
    std::uint64_t row = 0;
    for (auto v : r.confusion[i]) row += v;
    const auto expected = std::count(data_.labels.begin(), data_.labels.end(), static_cast<std::uint8_t>(i));
    EXPECT_EQ(row, static_cast<std::uint64_t>(expected));
  }
}

TEST_F(SmallEval, IndependentOfOrderAndThreads) {
  const EvalReport a = evaluate(model_, data_, all_, 1);
  std::vector<std::size_t> reversed(all_.rbegin(), all_.rend());
  const EvalReport b = evaluate(model_, data_, reversed, 3);
  EXPECT_EQ(a.confusion, b.confusion);
  EXPECT_EQ(a.oa, b.oa);
  EXPECT_EQ(predict_logits(model_, data_, all_, 1), predict_logits(model_, data_, all_, 2));
}

TEST_F(SmallEval, RejectsOutOfRangeIndex) {
  const std::vector<std::size_t> bad = {data_.size()};
  EXPECT_THROW(evaluate(model_, data_, bad), InvalidArgument);
  EXPECT_THROW(evaluate(model_, data_, std::vector<std::size_t>{}), InvalidArgument);
}

TEST_F(SmallEval, CsvWriters) {
  EvalReport r = evaluate(model_, data_, all_);
  attach(r, report_complexity(model_, input_shape(AcsnetConfig::desk()), 0, 0));
  EXPECT_EQ(r.params, 125673u);
  EXPECT_LT(r.fused_params, r.params);
  EXPECT_EQ(r.inference_time.runs, 0);
  const fs::path dir = fs::temp_directory_path() / "jamforge_test_csv";
  fs::create_directories(dir);
  write_confusion_csv(dir / "c.csv", r.confusion);
  write_metrics_csv(dir / "m.csv", r);
  write_per_jnr_csv(dir / "j.csv", r);
  const std::string c = slurp(dir / "c.csv");
  EXPECT_EQ(std::count(c.begin(), c.end(), '\n'), 10);
  EXPECT_EQ(c.rfind("true\\pred,", 0), 0u);
  const std::string m = slurp(dir / "m.csv");
  EXPECT_EQ(m.rfind("oa,kappa,flops,params,", 0), 0u);
  EXPECT_NE(m.find(",125673,"), std::string::npos);
  const std::string j = slurp(dir / "j.csv");
  EXPECT_EQ(std::count(j.begin(), j.end(), '\n'), 3);
  fs::remove_all(dir);
}

TEST(Complexity, TimingRunsRecorded) {
  nn::Model<float> m = build_acsnet(AcsnetConfig::desk(), 1);
  const Complexity c = report_complexity(m, input_shape(AcsnetConfig::desk()), 3, 1);
  EXPECT_EQ(c.inference_time.runs, 3);
  EXPECT_GT(c.inference_time.mean_ms, 0.0);
  EXPECT_EQ(c.flops, 173065335u);
  EXPECT_EQ(c.fused_flops, 105727095u);
  EXPECT_THROW(report_complexity(m, input_shape(AcsnetConfig::desk()), -1, 0), InvalidArgument);
}

}  // namespace
}  // namespace jamforge::acsnet
