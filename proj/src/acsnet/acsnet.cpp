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

#include "jamforge/acsnet/acsnet.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <thread>

#if defined(__GLIBC__)
#include <malloc.h>
#endif

#include "jamforge/errors.hpp"

namespace jamforge::acsnet {
namespace {

constexpr std::size_t kEvalChunk = 64;
constexpr std::uint64_t kShuffleStream = 0x5F1E;

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

std::ofstream open_csv(const std::filesystem::path& path) {
  std::ofstream os(path, std::ios::trunc);
  if (!os) {
    throw PersistError("cannot open " + path.string() + " for writing");
  }
  return os;
}

void close_csv(std::ofstream& os, const std::filesystem::path& path) {
  os.flush();
  if (!os) {
    throw PersistError("write failed for " + path.string());
  }
}

nn::Tensor<float> gather_batch(const dataset::Dataset& data, std::span<const std::size_t> indices) {
  const std::size_t side = tf::kImageSide;
  nn::Tensor<float> x({indices.size(), 1, side, side});
  for (std::size_t i = 0; i < indices.size(); ++i) {
    const std::span<const float> img = data.image(indices[i]);
    std::copy(img.begin(), img.end(), x.data() + i * tf::kImagePixels);
  }
  return x;
}

void check_indices(const dataset::Dataset& data, std::span<const std::size_t> indices, const char* what) {
  for (std::size_t i : indices) {
    if (i >= data.size()) {
      throw InvalidArgument(std::string(what) + ": sample index " + std::to_string(i) + " outside dataset of " +
                            std::to_string(data.size()));
    }
  }
}

double test_accuracy(const nn::Model<float>& model, const dataset::Dataset& data,
                     std::span<const std::size_t> test, int threads) {
  const std::vector<float> logits = predict_logits(model, data, test, threads);
  std::size_t correct = 0;
  for (std::size_t i = 0; i < test.size(); ++i) {
    const std::span<const float> row(logits.data() + i * kNumClasses, kNumClasses);
    correct += argmax(row) == data.labels[test[i]] ? 1 : 0;
  }
  return static_cast<double>(correct) / static_cast<double>(test.size());
}

// Activations of the first stages are tens of megabytes. glibc returns such
// blocks to the OS on free, so every step would page-fault them back in;
// keeping them in the heap avoids that.
void retain_large_blocks() {
#if defined(__GLIBC__)
  static const bool once = [] {
    mallopt(M_MMAP_THRESHOLD, 1 << 30);
    mallopt(M_TRIM_THRESHOLD, 1 << 30);
    return true;
  }();
  (void)once;
#endif
}

}  // namespace

std::string to_string(Preset preset) { return preset == Preset::Desk ? "desk" : "paper"; }

Preset preset_from_string(const std::string& name) {
  if (name == "desk") return Preset::Desk;
  if (name == "paper") return Preset::Paper;
  throw InvalidArgument("unknown preset \"" + name + "\" (expected desk or paper)");
}

AcsnetConfig AcsnetConfig::desk() { return AcsnetConfig{}; }

AcsnetConfig AcsnetConfig::paper() {
  AcsnetConfig c;
  c.preset = Preset::Paper;
  c.channel_plan = {16, 32, 64, 128, 256, 256};
  c.fc_hidden = 512;
  return c;
}

AcsnetConfig AcsnetConfig::for_preset(Preset preset) { return preset == Preset::Desk ? desk() : paper(); }

void AcsnetConfig::validate() const {
  for (int c : channel_plan) {
    if (c < 1) throw InvalidArgument("AcsnetConfig: channel_plan entries must be positive");
  }
  if (stem_channels < 1) throw InvalidArgument("AcsnetConfig: stem_channels must be positive");
  if (fc_hidden < 0) throw InvalidArgument("AcsnetConfig: fc_hidden must be >= 0");
  if (num_classes != kNumClasses) {
    throw InvalidArgument("AcsnetConfig: num_classes must be " + std::to_string(kNumClasses));
  }
  if (input_side < 1) throw InvalidArgument("AcsnetConfig: input_side must be positive");
}

nn::Model<float> build_acsnet(const AcsnetConfig& cfg, std::uint64_t init_seed) {
  cfg.validate();
  using namespace nn;
  Model<float> m;
  const auto stem = static_cast<std::size_t>(cfg.stem_channels);
  m.emplace<Conv2d<float>>(1, stem, 3, 3, std::array<std::size_t, 2>{1, 1}, std::array<std::size_t, 2>{1, 1});
  m.emplace<BatchNorm2d<float>>(stem);
  m.emplace<Swish<float>>();
  m.emplace<MaxPool2d<float>>(2, 2, 1);
  std::size_t in = stem;
  for (std::size_t i = 0; i < cfg.channel_plan.size(); ++i) {
    const auto out = static_cast<std::size_t>(cfg.channel_plan[i]);
    m.emplace<Acb<float>>(in, out, 1);
    m.emplace<Swish<float>>();
    if (i % 2 == 1) {
      m.emplace<MaxPool2d<float>>(2, 2, 1);
    }
    in = out;
  }
  m.emplace<GlobalAvgPool<float>>();
  if (cfg.fc_hidden > 0) {
    m.emplace<Linear<float>>(in, static_cast<std::size_t>(cfg.fc_hidden));
    m.emplace<Swish<float>>();
    in = static_cast<std::size_t>(cfg.fc_hidden);
  }
  m.emplace<Linear<float>>(in, static_cast<std::size_t>(cfg.num_classes));
  // Fails early if the input side collapses before the classifier.
  m.output_shape(input_shape(cfg));

  Rng rng(init_seed);
  init_parameters(m, rng);
  return m;
}

nn::Shape input_shape(const AcsnetConfig& cfg, std::size_t batch) {
  const auto side = static_cast<std::size_t>(cfg.input_side);
  return {batch, 1, side, side};
}

void TrainConfig::validate() const {
  if (batch_size < 1) throw InvalidArgument("TrainConfig: batch_size must be >= 1");
  if (epochs < 0) throw InvalidArgument("TrainConfig: epochs must be >= 0");
  if (!(lr >= 0.0) || !std::isfinite(lr)) throw InvalidArgument("TrainConfig: lr must be finite and >= 0");
  if (eval_threads < 1) throw InvalidArgument("TrainConfig: eval_threads must be >= 1");
}

TrainResult train(nn::Model<float>& model, const dataset::Dataset& data, const dataset::Split& split,
                  const TrainConfig& tc, const EpochCallback& on_epoch) {
  tc.validate();
  if (data.size() == 0 || split.train.empty()) {
    throw InvalidArgument("train: dataset or train split is empty");
  }
  check_indices(data, split.train, "train");
  check_indices(data, split.test, "train");

  retain_large_blocks();
  TrainResult result;
  result.optimizer.lr = tc.lr;
  const std::vector<nn::ParamRef<float>> params = model.parameters();
  const auto batch = static_cast<std::size_t>(tc.batch_size);

  std::vector<std::size_t> order;
  std::vector<int> labels;
  for (int epoch = 1; epoch <= tc.epochs; ++epoch) {
    model.set_mode(nn::Mode::Train);
    order = split.train;
    Rng rng(derive_seed(tc.seed, {kShuffleStream, static_cast<std::uint64_t>(epoch)}));
    for (std::size_t i = order.size() - 1; i > 0; --i) {
      const auto j = static_cast<std::size_t>(rng.uniform_int(0, static_cast<std::int64_t>(i)));
      std::swap(order[i], order[j]);
    }

    double loss_sum = 0.0;
    int batch_index = 0;
    for (std::size_t begin = 0; begin < order.size(); begin += batch, ++batch_index) {
      const std::size_t end = std::min(begin + batch, order.size());
      const std::span<const std::size_t> idx(order.data() + begin, end - begin);
      const nn::Tensor<float> x = gather_batch(data, idx);
      labels.assign(idx.size(), 0);
      for (std::size_t i = 0; i < idx.size(); ++i) labels[i] = data.labels[idx[i]];

      const nn::Tensor<float> logits = model.forward(x);
      const nn::CrossEntropyResult<float> ce = nn::cross_entropy(logits, std::span<const int>(labels));
      if (!std::isfinite(ce.loss)) {
        throw TrainingDiverged(epoch, batch_index);
      }
      model.backward(ce.grad);
      try {
        nn::adam_step(std::span<const nn::ParamRef<float>>(params), result.optimizer);
      } catch (const NumericDomainError&) {
        throw TrainingDiverged(epoch, batch_index);
      }
      loss_sum += ce.loss * static_cast<double>(idx.size());
    }

    EpochStats stats;
    stats.epoch = epoch;
    stats.train_loss = loss_sum / static_cast<double>(order.size());
    if (tc.track_test_oa && !split.test.empty()) {
      stats.test_oa = test_accuracy(model, data, split.test, tc.eval_threads);
    }
    result.trace.push_back(stats);
    if (on_epoch) on_epoch(stats);
  }
  model.set_mode(nn::Mode::Eval);
  return result;
}

std::uint64_t EvalReport::total() const {
  std::uint64_t t = 0;
  for (const auto& row : confusion) {
    for (std::uint64_t v : row) t += v;
  }
  return t;
}

double overall_accuracy(const ConfusionMatrix& m) {
  std::uint64_t correct = 0;
  std::uint64_t total = 0;
  for (std::size_t i = 0; i < m.size(); ++i) {
    for (std::size_t j = 0; j < m.size(); ++j) {
      total += m[i][j];
      if (i == j) correct += m[i][j];
    }
  }
  return total ? static_cast<double>(correct) / static_cast<double>(total) : 0.0;
}

double chance_agreement(const ConfusionMatrix& m) {
  std::uint64_t total = 0;
  std::uint64_t agree = 0;
  for (std::size_t i = 0; i < m.size(); ++i) {
    std::uint64_t row = 0;
    std::uint64_t col = 0;
    for (std::size_t j = 0; j < m.size(); ++j) {
      row += m[i][j];
      col += m[j][i];
    }
    agree += row * col;
    total += row;
  }
  if (total == 0) return 0.0;
  const double t = static_cast<double>(total);
  return static_cast<double>(agree) / (t * t);
}

double kappa(const ConfusionMatrix& m) {
  const double p_oa = overall_accuracy(m);
  const double p_e = chance_agreement(m);
  if (p_e >= 1.0) return 1.0;
  return (p_oa - p_e) / (1.0 - p_e);
}

int argmax(std::span<const float> logits) {
  if (logits.empty()) {
    throw InvalidArgument("argmax: empty logits");
  }
  std::size_t best = 0;
  for (std::size_t i = 1; i < logits.size(); ++i) {
    if (logits[i] > logits[best]) best = i;
  }
  return static_cast<int>(best);
}

std::vector<float> predict_logits(const nn::Model<float>& model, const dataset::Dataset& data,
                                  std::span<const std::size_t> indices, int threads) {
  check_indices(data, indices, "predict_logits");
  const std::size_t chunks = (indices.size() + kEvalChunk - 1) / kEvalChunk;
  const std::size_t workers = std::max<std::size_t>(1, std::min<std::size_t>(static_cast<std::size_t>(std::max(threads, 1)), chunks));
  std::vector<float> logits(indices.size() * kNumClasses);

  auto work = [&](std::size_t worker) {
    nn::Model<float> local = model;
    local.set_mode(nn::Mode::Eval);
    for (std::size_t c = worker; c < chunks; c += workers) {
      const std::size_t begin = c * kEvalChunk;
      const std::size_t end = std::min(begin + kEvalChunk, indices.size());
      const nn::Tensor<float> out = local.forward(gather_batch(data, indices.subspan(begin, end - begin)));
      if (out.rank() != 2 || out.dim(1) != static_cast<std::size_t>(kNumClasses)) {
        throw InvalidArgument("predict_logits: model output " + nn::shape_str(out.shape()) + " is not (N, 9)");
      }
      std::copy(out.data(), out.data() + out.size(), logits.data() + begin * kNumClasses);
    }
  };

  if (workers == 1) {
    work(0);
  } else {
    std::vector<std::exception_ptr> errors(workers);
    {
      std::vector<std::jthread> pool;
      for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
          try {
            work(w);
          } catch (...) {
            errors[w] = std::current_exception();
          }
        });
      }
    }
    for (const auto& e : errors) {
      if (e) std::rethrow_exception(e);
    }
  }
  return logits;
}

EvalReport evaluate(const nn::Model<float>& model, const dataset::Dataset& data,
                    std::span<const std::size_t> indices, int threads) {
  if (indices.empty()) {
    throw InvalidArgument("evaluate: no samples to evaluate");
  }
  const std::vector<float> logits = predict_logits(model, data, indices, threads);
  EvalReport r;
  for (std::size_t i = 0; i < indices.size(); ++i) {
    const std::size_t idx = indices[i];
    const int truth = data.labels[idx];
    const int pred = argmax(std::span<const float>(logits.data() + i * kNumClasses, kNumClasses));
    r.confusion[static_cast<std::size_t>(truth)][static_cast<std::size_t>(pred)] += 1;
    const dataset::SampleRecord& rec = data.manifest.records[idx];
    GroupAccuracy& gj = r.per_jnr[rec.jnr_db];
    GroupAccuracy& gp = r.per_pr[rec.pr_db];
    gj.total += 1;
    gp.total += 1;
    if (truth == pred) {
      gj.correct += 1;
      gp.correct += 1;
    }
  }
  r.oa = overall_accuracy(r.confusion);
  r.kappa = kappa(r.confusion);
  return r;
}

Complexity report_complexity(const nn::Model<float>& model, const nn::Shape& input_shape, int runs, int warmup) {
  if (runs < 0 || warmup < 0) {
    throw InvalidArgument("report_complexity: runs and warmup must be >= 0");
  }
  nn::Model<float> training = model;
  nn::Model<float> fused = nn::fuse_acbs(model);
  Complexity c;
  c.flops = nn::count_flops(training, input_shape);
  c.params = nn::count_params(training);
  c.fused_flops = nn::count_flops(fused, input_shape);
  c.fused_params = nn::count_params(fused);

  if (runs == 0) return c;

  nn::Shape single = input_shape;
  single[0] = 1;
  nn::Tensor<float> x(single);
  Rng rng(0x71E);
  for (std::size_t i = 0; i < x.size(); ++i) x[i] = static_cast<float>(rng.uniform());
  fused.set_mode(nn::Mode::Eval);
  for (int i = 0; i < warmup; ++i) fused.forward(x);

  std::vector<double> ms(static_cast<std::size_t>(runs));
  for (auto& t : ms) {
    const auto start = std::chrono::steady_clock::now();
    fused.forward(x);
    t = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  }
  double sum = 0.0;
  for (double t : ms) sum += t;
  const double mean = sum / static_cast<double>(runs);
  double sq = 0.0;
  for (double t : ms) sq += (t - mean) * (t - mean);
  c.inference_time = {mean, runs > 1 ? std::sqrt(sq / static_cast<double>(runs - 1)) : 0.0, runs};
  return c;
}

void attach(EvalReport& report, const Complexity& c) {
  report.flops = c.flops;
  report.params = c.params;
  report.fused_flops = c.fused_flops;
  report.fused_params = c.fused_params;
  report.inference_time = c.inference_time;
}

void write_confusion_csv(const std::filesystem::path& path, const ConfusionMatrix& m) {
  std::ofstream os = open_csv(path);
  os << "true\\pred";
  for (int j = 0; j < kNumClasses; ++j) os << ',' << class_name(j);
  os << '\n';
  for (int i = 0; i < kNumClasses; ++i) {
    os << class_name(i);
    for (int j = 0; j < kNumClasses; ++j) os << ',' << m[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
    os << '\n';
  }
  close_csv(os, path);
}

void write_metrics_csv(const std::filesystem::path& path, const EvalReport& r) {
  std::ofstream os = open_csv(path);
  os << "oa,kappa,flops,params,time_ms,time_std_ms,fused_flops,fused_params,samples\n";
  os << fmt(r.oa) << ',' << fmt(r.kappa) << ',' << r.flops << ',' << r.params << ','
     << fmt(r.inference_time.mean_ms) << ',' << fmt(r.inference_time.stddev_ms) << ',' << r.fused_flops << ','
     << r.fused_params << ',' << r.total() << '\n';
  close_csv(os, path);
}

namespace {
void write_groups(const std::filesystem::path& path, const char* key, const std::map<double, GroupAccuracy>& g) {
  std::ofstream os = open_csv(path);
  os << key << ",oa,samples\n";
  for (const auto& [value, acc] : g) os << fmt(value) << ',' << fmt(acc.oa()) << ',' << acc.total << '\n';
  close_csv(os, path);
}
}  // namespace

void write_per_jnr_csv(const std::filesystem::path& path, const EvalReport& r) { write_groups(path, "jnr_db", r.per_jnr); }

void write_per_pr_csv(const std::filesystem::path& path, const EvalReport& r) { write_groups(path, "pr_db", r.per_pr); }

void write_trace_csv(const std::filesystem::path& path, std::span<const EpochStats> trace) {
  std::ofstream os = open_csv(path);
  os << "epoch,train_loss,test_oa\n";
  for (const EpochStats& s : trace) os << s.epoch << ',' << fmt(s.train_loss) << ',' << fmt(s.test_oa) << '\n';
  close_csv(os, path);
}

}  // namespace jamforge::acsnet
