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

#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "jamforge/dataset/dataset.hpp"
#include "jamforge/nn/adam.hpp"
#include "jamforge/nn/model.hpp"

namespace jamforge::acsnet {

enum class Preset { Desk, Paper };

std::string to_string(Preset preset);
/// Accepts "desk" and "paper"; throws InvalidArgument otherwise.
Preset preset_from_string(const std::string& name);

struct AcsnetConfig {
  Preset preset = Preset::Desk;
  std::array<int, 6> channel_plan = {16, 16, 32, 32, 64, 64};
  int stem_channels = 16;
  /// Width of the optional hidden linear layer; 0 skips it.
  int fc_hidden = 0;
  int num_classes = kNumClasses;
  int input_side = static_cast<int>(tf::kImageSide);

  static AcsnetConfig desk();
  static AcsnetConfig paper();
  static AcsnetConfig for_preset(Preset preset);

  void validate() const;
};

/// stem conv3x3 -> BN -> Swish -> maxpool, six ACB -> Swish stages with a
/// maxpool after stages 2, 4 and 6, global average pool, optional hidden
/// linear + Swish, linear classifier. Weights come from `init_seed`.
nn::Model<float> build_acsnet(const AcsnetConfig& cfg, std::uint64_t init_seed);

/// (1, 1, side, side).
nn::Shape input_shape(const AcsnetConfig& cfg, std::size_t batch = 1);

struct TrainConfig {
  int batch_size = 64;
  double lr = 0.01;
  int epochs = 15;
  std::uint64_t seed = 1;
  /// Evaluate on the test split after every epoch.
  bool track_test_oa = true;
  int eval_threads = 1;

  void validate() const;
};

struct EpochStats {
  int epoch = 0;
  double train_loss = 0.0;
  double test_oa = 0.0;
};

struct TrainResult {
  std::vector<EpochStats> trace;
  nn::AdamState<float> optimizer;
};

using EpochCallback = std::function<void(const EpochStats&)>;

/// Mini-batch Adam on the split's train indices. Each epoch shuffles with a
/// seed derived from tc.seed and the epoch index. Throws TrainingDiverged on
/// a non-finite loss or gradient.
TrainResult train(nn::Model<float>& model, const dataset::Dataset& data, const dataset::Split& split,
                  const TrainConfig& tc, const EpochCallback& on_epoch = {});

using ConfusionMatrix = std::array<std::array<std::uint64_t, kNumClasses>, kNumClasses>;

struct GroupAccuracy {
  std::uint64_t correct = 0;
  std::uint64_t total = 0;
  double oa() const { return total ? static_cast<double>(correct) / static_cast<double>(total) : 0.0; }
};

struct InferenceTime {
  double mean_ms = 0.0;
  double stddev_ms = 0.0;
  int runs = 0;
};

struct EvalReport {
  ConfusionMatrix confusion{};  // rows = true class, cols = predicted
  double oa = 0.0;
  double kappa = 0.0;
  std::map<double, GroupAccuracy> per_jnr;
  std::map<double, GroupAccuracy> per_pr;
  std::uint64_t flops = 0;
  std::uint64_t params = 0;
  std::uint64_t fused_flops = 0;
  std::uint64_t fused_params = 0;
  InferenceTime inference_time;

  std::uint64_t total() const;
};

/// Correct / total; 0 for an empty matrix.
double overall_accuracy(const ConfusionMatrix& m);
/// Chance agreement sum_i a_i b_i / M^2 with a = row sums, b = column sums.
double chance_agreement(const ConfusionMatrix& m);
/// (p_oa - p_e) / (1 - p_e); 1 when p_e = 1.
double kappa(const ConfusionMatrix& m);

/// Index of the largest value; the lowest index wins exact ties.
int argmax(std::span<const float> logits);

/// Eval-mode logits (indices.size() x num_classes). Samples are processed in
/// fixed chunks so the output does not depend on `threads`.
std::vector<float> predict_logits(const nn::Model<float>& model, const dataset::Dataset& data,
                                  std::span<const std::size_t> indices, int threads = 1);

/// Confusion, OA, kappa, per-JNR and per-PR accuracy. Complexity fields are
/// left zero; see report_complexity().
EvalReport evaluate(const nn::Model<float>& model, const dataset::Dataset& data,
                    std::span<const std::size_t> indices, int threads = 1);

struct Complexity {
  std::uint64_t flops = 0;
  std::uint64_t params = 0;
  std::uint64_t fused_flops = 0;
  std::uint64_t fused_params = 0;
  InferenceTime inference_time;
};

/// FLOPs and parameters of the training form and its fused twin, plus the
/// wall time of `runs` single-sample fused forward passes after `warmup` passes.
/// runs = 0 skips the timing and leaves inference_time zero.
Complexity report_complexity(const nn::Model<float>& model, const nn::Shape& input_shape, int runs = 100,
                             int warmup = 10);

void attach(EvalReport& report, const Complexity& c);

void write_confusion_csv(const std::filesystem::path& path, const ConfusionMatrix& m);
void write_metrics_csv(const std::filesystem::path& path, const EvalReport& r);
void write_per_jnr_csv(const std::filesystem::path& path, const EvalReport& r);
void write_per_pr_csv(const std::filesystem::path& path, const EvalReport& r);
void write_trace_csv(const std::filesystem::path& path, std::span<const EpochStats> trace);

}  // namespace jamforge::acsnet
