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

#include "jamforge/cli/cli.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <numeric>
#include <string>
#include <vector>

#include "jamforge/acsnet/acsnet.hpp"
#include "jamforge/dataset/json_io.hpp"
#include "jamforge/errors.hpp"
#include "jamforge/nn/checkpoint.hpp"

#ifndef JAMFORGE_VERSION
#define JAMFORGE_VERSION "0.0.0"
#endif

namespace jamforge::cli {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

std::string fmt(double v, const char* spec = "%.6f") {
  char buf[64];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

struct Globals {
  int threads = 1;
};

struct SpectrogramOpts {
  int class_id = 0;
  double jnr_db = 10.0;
  double pr_db = 0.0;
  std::uint64_t seed = 1;
  std::string out;
};

struct GenOpts {
  std::string out;
  bool force = false;
  std::vector<double> jnr_db = dataset::default_jnr_grid();
  std::vector<double> pr_db = {0.0};
  int samples = 20;
  std::vector<int> classes = {0, 1, 2, 3, 4, 5, 6, 7, 8};
  std::uint64_t seed = 1;
};

struct TrainOpts {
  std::string dataset;
  std::string preset = "desk";
  int epochs = 15;
  std::uint64_t seed = 1;
  std::uint64_t split_seed = 1;
  double train_fraction = 0.8;
  double lr = 0.01;
  int batch_size = 64;
  bool skip_test_oa = false;
  std::string out_model;
  std::string out_trace;
};

struct EvalOpts {
  std::string model;
  std::string dataset;
  std::uint64_t split_seed = 1;
  double train_fraction = 0.8;
  std::string out_dir;
  int timing_runs = 100;
};

struct FlopsOpts {
  std::string preset = "desk";
  std::string model;
};

/// Resolved value of every long option: the parsed results, or the default.
json resolved_options(const CLI::App& app) {
  json j = json::object();
  for (const CLI::Option* opt : app.get_options()) {
    if (opt->get_lnames().empty()) continue;
    const std::string& name = opt->get_lnames().front();
    if (name == "help" || name == "config") continue;
    std::string value;
    if (opt->count() > 0) {
      const auto& res = opt->results();
      for (std::size_t i = 0; i < res.size(); ++i) value += (i ? " " : "") + res[i];
    } else {
      value = opt->get_default_str();
    }
    j[name] = value;
  }
  return j;
}

void echo_config(const CLI::App& root, const CLI::App& sub, std::ostream& out) {
  out << "# resolved configuration\n";
  out << "threads=" << resolved_options(root).value("threads", "1") << "\n";
  out << "[" << sub.get_name() << "]\n";
  const json opts = resolved_options(sub);
  for (const auto& [key, value] : opts.items()) {
    out << key << "=" << value.get<std::string>() << "\n";
  }
}

void write_run_manifest(const fs::path& dir, const CLI::App& root, const CLI::App& sub, const json& seeds) {
  json j;
  j["tool"] = "jamforge";
  j["version"] = JAMFORGE_VERSION;
  j["subcommand"] = sub.get_name();
  j["config"] = resolved_options(sub);
  j["threads"] = resolved_options(root).value("threads", "1");
  j["seeds"] = seeds;
  j["artifact_versions"] = {{"dataset_format", dataset::kFormatVersion},
                            {"checkpoint", nn::kCheckpointVersion}};
  const fs::path path = dir / "run_manifest.json";
  std::ofstream os(path, std::ios::trunc);
  if (!os) {
    throw PersistError("cannot open " + path.string() + " for writing");
  }
  os << j.dump(2) << "\n";
  if (!os) {
    throw PersistError("write failed for " + path.string());
  }
}

void ensure_dir(const fs::path& dir) {
  if (dir.empty()) return;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) {
    throw PersistError("cannot create " + dir.string() + ": " + ec.message());
  }
}

void require_exists(const fs::path& path, const char* what) {
  if (!fs::exists(path)) {
    throw PersistError(std::string(what) + " not found: " + path.string());
  }
}

fs::path parent_or_cwd(const fs::path& p) {
  return p.has_parent_path() ? p.parent_path() : fs::path(".");
}

void cmd_spectrogram(const SpectrogramOpts& o, const CLI::App& root, const CLI::App& sub, std::ostream& out) {
  dataset::DatasetConfig cfg;
  cfg.jnr_grid_db = {o.jnr_db};
  cfg.pr_db = {o.pr_db};
  cfg.classes = {o.class_id};
  cfg.samples_per_class_per_jnr = 1;
  cfg.master_seed = o.seed;
  cfg.validate();

  dataset::SampleRecord rec = dataset::plan_records(cfg).front();
  const tf::Spectrogram img = dataset::generate_sample(cfg, rec);

  const fs::path dir(o.out);
  ensure_dir(dir);
  tf::write_pgm(dir / "spectrogram.pgm", img.pixels, tf::kImageSide, tf::kImageSide);
  tf::write_raw_f32(dir / "spectrogram.f32", img.pixels);

  json side;
  side["class_id"] = o.class_id;
  side["class_name"] = class_name(o.class_id);
  side["jnr_db"] = o.jnr_db;
  side["pr_db"] = o.pr_db;
  side["seed"] = rec.seed;
  side["degenerate"] = rec.degenerate;
  side["spec"] = rec.spec;
  side["height"] = tf::kImageSide;
  side["width"] = tf::kImageSide;
  side["layout"] = "row-major float32, frequency rows ascending, time columns";
  side["files"] = {{"pgm", "spectrogram.pgm"}, {"raw", "spectrogram.f32"}};
  const fs::path side_path = dir / "spectrogram.json";
  std::ofstream os(side_path, std::ios::trunc);
  if (!os) {
    throw PersistError("cannot open " + side_path.string() + " for writing");
  }
  os << side.dump(2) << "\n";
  if (!os) {
    throw PersistError("write failed for " + side_path.string());
  }
  write_run_manifest(dir, root, sub, {{"sample", rec.seed}, {"master", o.seed}});
  out << "wrote " << (dir / "spectrogram.pgm").string() << ", spectrogram.f32, spectrogram.json ("
      << class_name(o.class_id) << ", JNR " << o.jnr_db << " dB)\n";
}

void cmd_gen_dataset(const GenOpts& o, const Globals& g, const CLI::App& root, const CLI::App& sub,
                     std::ostream& out) {
  dataset::DatasetConfig cfg;
  cfg.jnr_grid_db = o.jnr_db;
  cfg.pr_db = o.pr_db;
  cfg.samples_per_class_per_jnr = o.samples;
  cfg.classes = o.classes;
  cfg.master_seed = o.seed;
  cfg.validate();

  const fs::path dir(o.out);
  if (fs::exists(dir) && !o.force) {
    throw PersistError("output path " + dir.string() + " already exists; pass --force to overwrite");
  }
  const dataset::DatasetManifest manifest = dataset::generate_dataset(cfg, dir, g.threads);
  write_run_manifest(dir, root, sub, {{"master", o.seed}});

  std::map<int, std::map<double, std::size_t>> counts;
  std::size_t degenerate = 0;
  for (const auto& r : manifest.records) {
    ++counts[r.class_id][r.jnr_db];
    degenerate += r.degenerate ? 1 : 0;
  }
  out << "wrote " << manifest.records.size() << " samples to " << dir.string() << "\n";
  out << "class";
  for (double j : cfg.jnr_grid_db) out << "," << j;
  out << "\n";
  for (const auto& [cls, row] : counts) {
    out << class_name(cls);
    for (double j : cfg.jnr_grid_db) {
      const auto it = row.find(j);
      out << "," << (it == row.end() ? 0 : it->second);
    }
    out << "\n";
  }
  out << "degenerate samples: " << degenerate << "\n";
}

void cmd_train(const TrainOpts& o, const Globals& g, const CLI::App& root, const CLI::App& sub,
               std::ostream& out) {
  if (o.out_model.empty()) {
    throw InvalidArgument("--out-model is required");
  }
  acsnet::TrainConfig tc;
  tc.batch_size = o.batch_size;
  tc.lr = o.lr;
  tc.epochs = o.epochs;
  tc.seed = o.seed;
  tc.track_test_oa = !o.skip_test_oa;
  tc.eval_threads = g.threads;
  tc.validate();
  const acsnet::AcsnetConfig mc = acsnet::AcsnetConfig::for_preset(acsnet::preset_from_string(o.preset));

  require_exists(o.dataset, "dataset");
  const dataset::Dataset data = dataset::load_dataset(o.dataset);
  const dataset::Split split = dataset::split_dataset(data.manifest, o.train_fraction, o.split_seed);

  const fs::path model_path(o.out_model);
  const fs::path trace_path = o.out_trace.empty() ? parent_or_cwd(model_path) / "trace.csv" : fs::path(o.out_trace);
  ensure_dir(parent_or_cwd(model_path));
  ensure_dir(parent_or_cwd(trace_path));

  nn::Model<float> model = acsnet::build_acsnet(mc, o.seed);
  out << "training " << o.preset << " preset: " << split.train.size() << " train / " << split.test.size()
      << " test samples, " << o.epochs << " epochs\n";
  const acsnet::TrainResult result = acsnet::train(model, data, split, tc, [&](const acsnet::EpochStats& s) {
    out << "epoch " << s.epoch << " loss " << fmt(s.train_loss);
    if (tc.track_test_oa) out << " test_oa " << fmt(s.test_oa, "%.4f");
    out << std::endl;
  });

  nn::save_checkpoint(model_path, model, &result.optimizer);
  acsnet::write_trace_csv(trace_path, result.trace);
  const json seeds = {{"init", o.seed}, {"shuffle", o.seed}, {"split", o.split_seed}};
  write_run_manifest(parent_or_cwd(model_path), root, sub, seeds);
  if (fs::absolute(parent_or_cwd(trace_path)) != fs::absolute(parent_or_cwd(model_path))) {
    write_run_manifest(parent_or_cwd(trace_path), root, sub, seeds);
  }

  const acsnet::EvalReport rep = acsnet::evaluate(model, data, split.test, g.threads);
  out << "final test OA " << fmt(rep.oa, "%.4f") << " kappa " << fmt(rep.kappa, "%.4f") << "\n";
  out << "wrote " << model_path.string() << " and " << trace_path.string() << "\n";
}

void cmd_eval(const EvalOpts& o, const Globals& g, const CLI::App& root, const CLI::App& sub, std::ostream& out) {
  if (o.timing_runs < 0) {
    throw InvalidArgument("--timing-runs must be >= 0");
  }
  require_exists(o.model, "model");
  require_exists(o.dataset, "dataset");
  nn::Checkpoint ck = nn::load_checkpoint(o.model);
  const dataset::Dataset data = dataset::load_dataset(o.dataset);
  const dataset::Split split = dataset::split_dataset(data.manifest, o.train_fraction, o.split_seed);

  acsnet::EvalReport rep = acsnet::evaluate(ck.model, data, split.test, g.threads);
  const nn::Shape in_shape = {1, 1, tf::kImageSide, tf::kImageSide};
  acsnet::attach(rep, acsnet::report_complexity(ck.model, in_shape, o.timing_runs));

  const fs::path dir(o.out_dir);
  ensure_dir(dir);
  acsnet::write_confusion_csv(dir / "confusion.csv", rep.confusion);
  acsnet::write_metrics_csv(dir / "metrics.csv", rep);
  acsnet::write_per_jnr_csv(dir / "per_jnr.csv", rep);
  acsnet::write_per_pr_csv(dir / "per_pr.csv", rep);
  write_run_manifest(dir, root, sub, {{"split", o.split_seed}});

  out << "test samples " << rep.total() << "\n";
  out << "OA " << fmt(rep.oa, "%.4f") << " kappa " << fmt(rep.kappa, "%.4f") << "\n";
  out << "flops " << rep.flops << " params " << rep.params << " (fused: flops " << rep.fused_flops << " params "
      << rep.fused_params << ")\n";
  if (o.timing_runs > 0) {
    out << "fused inference " << fmt(rep.inference_time.mean_ms, "%.3f") << " ms +- "
        << fmt(rep.inference_time.stddev_ms, "%.3f") << " ms over " << rep.inference_time.runs << " runs\n";
  }
  out << "wrote confusion.csv, metrics.csv, per_jnr.csv, per_pr.csv to " << dir.string() << "\n";
}

void cmd_flops(const FlopsOpts& o, std::ostream& out) {
  nn::Model<float> model;
  std::string label;
  if (!o.model.empty()) {
    require_exists(o.model, "model");
    model = std::move(nn::load_checkpoint(o.model).model);
    label = o.model;
  } else {
    model = acsnet::build_acsnet(acsnet::AcsnetConfig::for_preset(acsnet::preset_from_string(o.preset)), 1);
    label = o.preset + " preset";
  }
  const nn::Shape in_shape = {1, 1, tf::kImageSide, tf::kImageSide};
  const acsnet::Complexity c = acsnet::report_complexity(model, in_shape, 0, 0);
  out << label << ", input 1x1x" << tf::kImageSide << "x" << tf::kImageSide << "\n";
  out << "training form: flops " << c.flops << " params " << c.params << "\n";
  out << "fused form:    flops " << c.fused_flops << " params " << c.fused_params << "\n";
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"GNSS compound jamming spectrogram generation and ACSNet training", "jamforge"};
  app.set_version_flag("--version", JAMFORGE_VERSION);
  app.set_config("--config", "", "INI config file; [section] names select the subcommand");
  app.allow_config_extras(CLI::config_extras_mode::error);
  app.require_subcommand(1);
  app.fallthrough();

  Globals g;
  app.add_option("--threads", g.threads, "Worker threads (JAMFORGE_THREADS)")
      ->envname("JAMFORGE_THREADS")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();

  SpectrogramOpts so;
  CLI::App* spec_cmd = app.add_subcommand("spectrogram", "Synthesize one compound sample and write its image");
  spec_cmd->add_option("--class", so.class_id, "Class index")->required()->check(CLI::Range(0, kNumClasses - 1));
  spec_cmd->add_option("--jnr", so.jnr_db, "Jamming-to-noise ratio (dB)")->capture_default_str();
  spec_cmd->add_option("--pr", so.pr_db, "Power ratio of the two jammers (dB)")->capture_default_str();
  spec_cmd->add_option("--seed", so.seed, "Master seed")->capture_default_str();
  spec_cmd->add_option("--out", so.out, "Output directory")->required();

  GenOpts go;
  CLI::App* gen_cmd = app.add_subcommand("gen-dataset", "Generate a labelled spectrogram dataset");
  gen_cmd->add_option("--out", go.out, "Output directory")->required();
  gen_cmd->add_flag("--force", go.force, "Overwrite an existing output path")->capture_default_str();
  gen_cmd->add_option("--jnr", go.jnr_db, "JNR grid (dB)")->capture_default_str();
  gen_cmd->add_option("--pr", go.pr_db, "Power ratios (dB)")->capture_default_str();
  gen_cmd->add_option("--samples", go.samples, "Samples per class per JNR per PR")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  gen_cmd->add_option("--classes", go.classes, "Class indices")
      ->check(CLI::Range(0, kNumClasses - 1))
      ->capture_default_str();
  gen_cmd->add_option("--seed", go.seed, "Master seed")->capture_default_str();

  TrainOpts to;
  CLI::App* train_cmd = app.add_subcommand("train", "Train ACSNet on a generated dataset");
  train_cmd->add_option("--dataset", to.dataset, "Dataset directory")->required();
  train_cmd->add_option("--preset", to.preset, "Architecture preset")
      ->check(CLI::IsMember({"desk", "paper"}))
      ->capture_default_str();
  train_cmd->add_option("--epochs", to.epochs, "Epochs")->check(CLI::NonNegativeNumber)->capture_default_str();
  train_cmd->add_option("--seed", to.seed, "Initialization and shuffle seed")->capture_default_str();
  train_cmd->add_option("--split-seed", to.split_seed, "Train/test split seed")->capture_default_str();
  train_cmd->add_option("--train-fraction", to.train_fraction, "Train share of every cell")
      ->check(CLI::Range(0.0, 1.0))
      ->capture_default_str();
  train_cmd->add_option("--lr", to.lr, "Adam learning rate")->check(CLI::NonNegativeNumber)->capture_default_str();
  train_cmd->add_option("--batch-size", to.batch_size, "Mini-batch size")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  train_cmd->add_flag("--skip-test-oa", to.skip_test_oa, "Do not evaluate the test split after each epoch")
      ->capture_default_str();
  train_cmd->add_option("--out-model", to.out_model, "Checkpoint path")->required();
  train_cmd->add_option("--out-trace", to.out_trace, "Trace CSV path (default: trace.csv next to the model)");

  EvalOpts eo;
  CLI::App* eval_cmd = app.add_subcommand("eval", "Evaluate a checkpoint on the test split");
  eval_cmd->add_option("--model", eo.model, "Checkpoint path")->required();
  eval_cmd->add_option("--dataset", eo.dataset, "Dataset directory")->required();
  eval_cmd->add_option("--split-seed", eo.split_seed, "Train/test split seed")->capture_default_str();
  eval_cmd->add_option("--train-fraction", eo.train_fraction, "Train share of every cell")
      ->check(CLI::Range(0.0, 1.0))
      ->capture_default_str();
  eval_cmd->add_option("--out-dir", eo.out_dir, "Directory for the CSV reports")->required();
  eval_cmd->add_option("--timing-runs", eo.timing_runs, "Timed single-sample forward passes (0 skips timing)")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();

  FlopsOpts fo;
  CLI::App* flops_cmd = app.add_subcommand("flops", "Print FLOPs and parameters of both model forms");
  flops_cmd->add_option("--preset", fo.preset, "Architecture preset")
      ->check(CLI::IsMember({"desk", "paper"}))
      ->capture_default_str();
  flops_cmd->add_option("--model", fo.model, "Checkpoint to report instead of a preset");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e, out, err);
    return rc == 0 ? kExitOk : kExitUsage;
  }

  try {
    for (CLI::App* sub : app.get_subcommands()) {
      echo_config(app, *sub, out);
      if (sub == spec_cmd) cmd_spectrogram(so, app, *sub, out);
      if (sub == gen_cmd) cmd_gen_dataset(go, g, app, *sub, out);
      if (sub == train_cmd) cmd_train(to, g, app, *sub, out);
      if (sub == eval_cmd) cmd_eval(eo, g, app, *sub, out);
      if (sub == flops_cmd) cmd_flops(fo, out);
    }
  } catch (const InvalidArgument& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const TrainingDiverged& e) {
    err << "error: " << e.what() << "\n";
    return kExitNumeric;
  } catch (const NumericDomainError& e) {
    err << "error: " << e.what() << "\n";
    return kExitNumeric;
  } catch (const DegenerateInput& e) {
    err << "error: " << e.what() << "\n";
    return kExitNumeric;
  } catch (const std::exception& e) {
    // PersistError, FormatError, filesystem and JSON failures.
    err << "error: " << e.what() << "\n";
    return kExitIo;
  }
  return kExitOk;
}

}  // namespace jamforge::cli
