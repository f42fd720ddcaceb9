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

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "jamforge/signal/rng.hpp"
#include "jamforge/signal/types.hpp"
#include "jamforge/tf/cwd.hpp"
#include "jamforge/tf/spectrogram.hpp"

namespace jamforge::dataset {

inline constexpr int kFormatVersion = 1;
inline constexpr const char* kPayloadFile = "payload.jsd";
inline constexpr const char* kManifestFile = "manifest.jsonl";

/// Parameter ranges for random jammer draws.
struct JammerRanges {
  double fc_min_hz = 0.0;
  double fc_max_hz = 15.36e6;
  double bandwidth_min_hz = 1.536e6;
  double bandwidth_max_hz = 7.68e6;
  int mtj_tones_min = 2;
  int mtj_tones_max = 5;
  /// Minimum circular spacing between MTJ tones; 0 selects fs / 64.
  double mtj_min_spacing_hz = 0.0;
  /// Number of full PPNJ periods that fit in one capture.
  double ppnj_periods_min = 2.0;
  double ppnj_periods_max = 8.0;
  double ppnj_duty_min = 0.1;
  double ppnj_duty_max = 0.5;
  /// Recorded with every PPNJ spec; the square-pulse model does not use it.
  double ppnj_bandwidth_hz = 5e6;
};

std::vector<double> default_jnr_grid();

struct DatasetConfig {
  std::vector<double> jnr_grid_db = default_jnr_grid();
  std::vector<double> pr_db = {0.0};
  int samples_per_class_per_jnr = 20;
  std::vector<int> classes = {0, 1, 2, 3, 4, 5, 6, 7, 8};
  std::uint64_t master_seed = 1;
  std::size_t n = 1024;
  double fs_hz = 15.36e6;
  GnssParams gnss;
  tf::CwdConfig cwd;
  JammerRanges ranges;

  void validate() const;
  /// classes x |jnr grid| x |pr list| x samples per cell.
  std::size_t total_samples() const;
};

struct SampleRecord {
  std::size_t index = 0;
  int class_id = 0;
  double jnr_db = 0.0;
  double pr_db = 0.0;
  std::size_t jnr_index = 0;
  std::size_t pr_index = 0;
  std::size_t sample_index = 0;
  std::uint64_t seed = 0;
  CompoundSpec spec;
  std::uint64_t offset = 0;
  bool degenerate = false;
};

struct DatasetManifest {
  int format_version = kFormatVersion;
  DatasetConfig config;
  std::vector<SampleRecord> records;
};

/// In-memory dataset: manifest plus contiguous 128x128 images.
struct Dataset {
  DatasetManifest manifest;
  std::vector<std::uint8_t> labels;
  std::vector<float> pixels;

  std::size_t size() const noexcept { return labels.size(); }
  std::span<const float> image(std::size_t i) const {
    return {pixels.data() + i * tf::kImagePixels, tf::kImagePixels};
  }
};

struct Split {
  std::vector<std::size_t> train;
  std::vector<std::size_t> test;
};

/// Draws one jammer's free parameters from the configured ranges.
JammerSpec sample_jammer_spec(JammerKind kind, Rng& rng, const DatasetConfig& cfg);

/// Seed of sample (class, jnr index, pr index, sample index) under `master_seed`.
std::uint64_t sample_seed(std::uint64_t master_seed, int class_id, std::size_t jnr_index,
                          std::size_t pr_index, std::size_t sample_index);

/// Enumerates manifest records (without offsets or payload-dependent fields)
/// in storage order: class, then JNR, then PR, then sample.
std::vector<SampleRecord> plan_records(const DatasetConfig& cfg);

/// Produces the spectrogram for one planned record, filling in its spec and
/// degenerate flag. Depends only on the record's seed and coordinates.
tf::Spectrogram generate_sample(const DatasetConfig& cfg, SampleRecord& record);

/// Generates every sample and writes payload + manifest into `out_dir`.
/// Output bytes do not depend on `threads`. On I/O failure the partial files
/// are removed and PersistError is thrown.
DatasetManifest generate_dataset(const DatasetConfig& cfg, const std::filesystem::path& out_dir,
                                 int threads = 1);

/// Stratified split over (class, JNR, PR) cells. Each cell is shuffled with
/// `seed` and its first ceil(fraction * size) entries go to train, keeping at
/// least one test entry per cell.
Split split_dataset(const DatasetManifest& manifest, double train_fraction, std::uint64_t seed);

Dataset load_dataset(const std::filesystem::path& dir);
void save_dataset(const Dataset& dataset, const std::filesystem::path& dir);

/// Byte offset of sample `index` inside the payload file.
std::uint64_t payload_offset(std::size_t index);

}  // namespace jamforge::dataset
