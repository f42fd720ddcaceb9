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

#include "jamforge/dataset/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <numbers>
#include <string>
#include <thread>
#include <tuple>

#include "jamforge/dataset/json_io.hpp"
#include "jamforge/errors.hpp"
#include "jamforge/io/binary.hpp"
#include "jamforge/signal/synthesis.hpp"

namespace jamforge::dataset {
namespace {

constexpr char kMagic[5] = "JSD1";
constexpr std::uint64_t kHeaderBytes = 4 + 4 + 2 + 2;
constexpr std::uint64_t kRecordBytes = 1 + tf::kImagePixels * sizeof(float);

// Samples generated per worker between ordered writes.
constexpr std::size_t kChunkPerWorker = 16;

double circular_distance(double a, double b, double period) {
  double d = std::fmod(std::abs(a - b), period);
  return std::min(d, period - d);
}

void write_header(std::ostream& os, std::uint32_t count) {
  os.write(kMagic, 4);
  io::write_le<std::uint32_t>(os, count);
  io::write_le<std::uint16_t>(os, static_cast<std::uint16_t>(tf::kImageSide));
  io::write_le<std::uint16_t>(os, static_cast<std::uint16_t>(tf::kImageSide));
}

void write_sample(std::ostream& os, std::uint8_t label, std::span<const float> pixels) {
  io::write_le<std::uint8_t>(os, label);
  io::write_f32_array(os, pixels);
}

void write_manifest(const std::filesystem::path& path, const DatasetManifest& manifest) {
  std::ofstream os(path, std::ios::binary);
  if (!os) {
    throw PersistError("cannot open " + path.string() + " for writing");
  }
  const nlohmann::json header{{"format_version", manifest.format_version}, {"config", manifest.config}};
  os << header.dump() << '\n';
  for (const SampleRecord& r : manifest.records) {
    os << nlohmann::json(r).dump() << '\n';
  }
  if (!os) {
    throw PersistError("failed writing " + path.string());
  }
}

DatasetManifest read_manifest(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) {
    throw PersistError("cannot open " + path.string());
  }
  DatasetManifest manifest;
  std::string line;
  std::uint64_t offset = 0;
  bool have_header = false;
  while (std::getline(is, line)) {
    const std::uint64_t line_start = offset;
    offset += line.size() + 1;
    if (line.empty()) {
      continue;
    }
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw FormatError("manifest: malformed JSON line: " + std::string(e.what()), line_start);
    }
    try {
      if (!have_header) {
        manifest.format_version = j.at("format_version").get<int>();
        if (manifest.format_version != kFormatVersion) {
          throw FormatError("manifest: unsupported format_version " +
                                std::to_string(manifest.format_version),
                            line_start);
        }
        manifest.config = j.at("config").get<DatasetConfig>();
        have_header = true;
      } else {
        manifest.records.push_back(j.get<SampleRecord>());
      }
    } catch (const nlohmann::json::exception& e) {
      throw FormatError("manifest: missing or invalid field: " + std::string(e.what()), line_start);
    }
  }
  if (!have_header) {
    throw FormatError("manifest: missing header line", 0);
  }
  return manifest;
}

// Removes partial outputs unless released.
class PartialFileGuard {
 public:
  explicit PartialFileGuard(std::vector<std::filesystem::path> paths) : paths_(std::move(paths)) {}
  ~PartialFileGuard() {
    if (armed_) {
      std::error_code ec;
      for (const auto& p : paths_) {
        std::filesystem::remove(p, ec);
      }
    }
  }
  void release() { armed_ = false; }

 private:
  std::vector<std::filesystem::path> paths_;
  bool armed_ = true;
};

}  // namespace

std::vector<double> default_jnr_grid() {
  std::vector<double> grid;
  for (int v = -20; v <= 10; v += 2) {
    grid.push_back(v);
  }
  return grid;
}

void DatasetConfig::validate() const {
  if (samples_per_class_per_jnr < 1) {
    throw InvalidArgument("samples_per_class_per_jnr must be at least 1");
  }
  if (jnr_grid_db.empty()) {
    throw InvalidArgument("jnr_grid_db must be non-empty");
  }
  if (pr_db.empty()) {
    throw InvalidArgument("pr_db must name at least one power ratio");
  }
  if (classes.empty()) {
    throw InvalidArgument("classes must be non-empty");
  }
  for (int c : classes) {
    if (c < 0 || c >= kNumClasses) {
      throw InvalidArgument("class ids must be in 0..8, got " + std::to_string(c));
    }
  }
  std::vector<int> sorted = classes;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
    throw InvalidArgument("classes must not repeat");
  }
  for (double v : jnr_grid_db) {
    if (!std::isfinite(v)) throw InvalidArgument("jnr_grid_db values must be finite");
  }
  for (double v : pr_db) {
    if (!std::isfinite(v)) throw InvalidArgument("pr_db values must be finite");
  }
  if (n < 2 * static_cast<std::size_t>(cwd.lag_half_length)) {
    throw InvalidArgument("capture length n is shorter than the CWD lag span");
  }
  if (!(fs_hz > 0.0)) {
    throw InvalidArgument("fs_hz must be positive");
  }
  gnss.validate();
  cwd.validate();
  if (static_cast<std::size_t>(cwd.time_frames) != tf::kImageSide ||
      static_cast<std::size_t>(cwd.freq_bins) != tf::kImageSide) {
    throw InvalidArgument("dataset spectrograms must be 128x128");
  }
  const JammerRanges& r = ranges;
  if (!(r.fc_max_hz > r.fc_min_hz) || !(r.bandwidth_max_hz >= r.bandwidth_min_hz) ||
      !(r.bandwidth_min_hz > 0.0) || r.bandwidth_max_hz > fs_hz) {
    throw InvalidArgument("invalid carrier or bandwidth range");
  }
  if (r.mtj_tones_min < 2 || r.mtj_tones_max < r.mtj_tones_min) {
    throw InvalidArgument("invalid MTJ tone-count range");
  }
  if (!(r.ppnj_periods_min > 0.0) || r.ppnj_periods_max < r.ppnj_periods_min ||
      !(r.ppnj_duty_min > 0.0) || r.ppnj_duty_max > 1.0 || r.ppnj_duty_max < r.ppnj_duty_min) {
    throw InvalidArgument("invalid PPNJ period or duty range");
  }
}

std::size_t DatasetConfig::total_samples() const {
  return classes.size() * jnr_grid_db.size() * pr_db.size() *
         static_cast<std::size_t>(samples_per_class_per_jnr);
}

JammerSpec sample_jammer_spec(JammerKind kind, Rng& rng, const DatasetConfig& cfg) {
  const JammerRanges& r = cfg.ranges;
  const double two_pi = 2.0 * std::numbers::pi;
  switch (kind) {
    case JammerKind::Stj: {
      const double fc = rng.uniform(r.fc_min_hz, r.fc_max_hz);
      const double phase = rng.uniform(0.0, two_pi);
      return JammerSpec::stj(fc, phase);
    }
    case JammerKind::Mtj: {
      const double spacing = r.mtj_min_spacing_hz > 0.0 ? r.mtj_min_spacing_hz : cfg.fs_hz / 64.0;
      const auto count = static_cast<std::size_t>(rng.uniform_int(r.mtj_tones_min, r.mtj_tones_max));
      std::vector<Tone> tones;
      while (tones.size() < count) {
        const double f = rng.uniform(r.fc_min_hz, r.fc_max_hz);
        const bool clear = std::all_of(tones.begin(), tones.end(), [&](const Tone& t) {
          return circular_distance(t.freq_hz, f, cfg.fs_hz) >= spacing;
        });
        if (clear) {
          tones.push_back(Tone{1.0, f, 0.0});
        }
      }
      for (Tone& t : tones) {
        t.phase_rad = rng.uniform(0.0, two_pi);
      }
      return JammerSpec::mtj(std::move(tones));
    }
    case JammerKind::Pbnj: {
      const double fc = rng.uniform(r.fc_min_hz, r.fc_max_hz);
      const double phase = rng.uniform(0.0, two_pi);
      const double bw = rng.uniform(r.bandwidth_min_hz, r.bandwidth_max_hz);
      return JammerSpec::pbnj(fc, phase, bw);
    }
    case JammerKind::Lfmj: {
      const double fc = rng.uniform(r.fc_min_hz, r.fc_max_hz);
      const double phase = rng.uniform(0.0, two_pi);
      const double bw = rng.uniform(r.bandwidth_min_hz, r.bandwidth_max_hz);
      return JammerSpec::lfmj(fc, phase, bw, static_cast<double>(cfg.n) / cfg.fs_hz);
    }
    case JammerKind::Ppnj: {
      const double periods = rng.uniform(r.ppnj_periods_min, r.ppnj_periods_max);
      const double duty = rng.uniform(r.ppnj_duty_min, r.ppnj_duty_max);
      const double period_s = static_cast<double>(cfg.n) / periods / cfg.fs_hz;
      JammerSpec s = JammerSpec::ppnj(period_s, duty * period_s);
      s.bandwidth_hz = r.ppnj_bandwidth_hz;
      return s;
    }
  }
  throw InvalidArgument("unknown jammer kind");
}

std::uint64_t sample_seed(std::uint64_t master_seed, int class_id, std::size_t jnr_index,
                          std::size_t pr_index, std::size_t sample_index) {
  return derive_seed(master_seed, {static_cast<std::uint64_t>(class_id), jnr_index, pr_index, sample_index});
}

std::uint64_t payload_offset(std::size_t index) { return kHeaderBytes + index * kRecordBytes; }

std::vector<SampleRecord> plan_records(const DatasetConfig& cfg) {
  cfg.validate();
  std::vector<SampleRecord> records;
  records.reserve(cfg.total_samples());
  for (int class_id : cfg.classes) {
    for (std::size_t ji = 0; ji < cfg.jnr_grid_db.size(); ++ji) {
      for (std::size_t pi = 0; pi < cfg.pr_db.size(); ++pi) {
        for (std::size_t si = 0; si < static_cast<std::size_t>(cfg.samples_per_class_per_jnr); ++si) {
          SampleRecord r;
          r.index = records.size();
          r.class_id = class_id;
          r.jnr_db = cfg.jnr_grid_db[ji];
          r.pr_db = cfg.pr_db[pi];
          r.jnr_index = ji;
          r.pr_index = pi;
          r.sample_index = si;
          r.seed = sample_seed(cfg.master_seed, class_id, ji, pi, si);
          r.offset = payload_offset(r.index);
          records.push_back(r);
        }
      }
    }
  }
  return records;
}

tf::Spectrogram generate_sample(const DatasetConfig& cfg, SampleRecord& record) {
  Rng rng(record.seed);
  const auto& pair = kClassPairs.at(static_cast<std::size_t>(record.class_id));
  CompoundSpec spec;
  spec.first = sample_jammer_spec(pair[0], rng, cfg);
  spec.second = sample_jammer_spec(pair[1], rng, cfg);
  spec.pr_db = record.pr_db;
  spec.class_id = record.class_id;

  const ComplexSignal r = synthesize_received(cfg.gnss, spec, record.jnr_db, cfg.n, cfg.fs_hz, rng);
  const tf::TimeFrequencyMap map = tf::cwd(r, cfg.cwd);

  tf::SampleMeta meta;
  meta.spec = spec;
  meta.jnr_db = record.jnr_db;
  meta.pr_db = record.pr_db;
  meta.seed = record.seed;
  tf::Spectrogram image = tf::to_spectrogram(map, record.class_id, std::move(meta));
  record.spec = spec;
  record.degenerate = image.meta.degenerate;
  return image;
}

DatasetManifest generate_dataset(const DatasetConfig& cfg, const std::filesystem::path& out_dir,
                                 int threads) {
  DatasetManifest manifest;
  manifest.config = cfg;
  manifest.records = plan_records(cfg);
  if (manifest.records.size() > std::numeric_limits<std::uint32_t>::max()) {
    throw InvalidArgument("dataset too large for the payload format");
  }
  const auto workers = static_cast<std::size_t>(std::max(1, threads));

  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) {
    throw PersistError("cannot create " + out_dir.string() + ": " + ec.message());
  }
  const auto payload_path = out_dir / kPayloadFile;
  const auto manifest_path = out_dir / kManifestFile;
  PartialFileGuard guard({payload_path, manifest_path});

  std::ofstream os(payload_path, std::ios::binary);
  if (!os) {
    throw PersistError("cannot open " + payload_path.string() + " for writing");
  }
  write_header(os, static_cast<std::uint32_t>(manifest.records.size()));

  // Workers fill a chunk of slots; the single writer then emits them in index order.
  const std::size_t chunk = workers * kChunkPerWorker;
  std::vector<tf::Spectrogram> slots(chunk);
  for (std::size_t begin = 0; begin < manifest.records.size(); begin += chunk) {
    const std::size_t end = std::min(begin + chunk, manifest.records.size());
    auto work = [&](std::size_t worker) {
      for (std::size_t i = begin + worker; i < end; i += workers) {
        slots[i - begin] = generate_sample(cfg, manifest.records[i]);
      }
    };
    if (workers == 1) {
      work(0);
    } else {
      std::vector<std::jthread> pool;
      pool.reserve(workers);
      for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back(work, w);
      }
    }
    for (std::size_t i = begin; i < end; ++i) {
      const tf::Spectrogram& s = slots[i - begin];
      write_sample(os, static_cast<std::uint8_t>(s.label), s.pixels);
    }
    if (!os) {
      throw PersistError("failed writing " + payload_path.string());
    }
  }
  os.close();
  if (!os) {
    throw PersistError("failed closing " + payload_path.string());
  }
  write_manifest(manifest_path, manifest);
  guard.release();
  return manifest;
}

Split split_dataset(const DatasetManifest& manifest, double train_fraction, std::uint64_t seed) {
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
    throw InvalidArgument("train_fraction must lie strictly between 0 and 1");
  }
  std::map<std::tuple<int, double, double>, std::vector<std::size_t>> cells;
  for (std::size_t i = 0; i < manifest.records.size(); ++i) {
    const SampleRecord& r = manifest.records[i];
    cells[{r.class_id, r.jnr_db, r.pr_db}].push_back(i);
  }
  Split split;
  Rng rng(derive_seed(seed, {0x5315u}));
  for (auto& [key, members] : cells) {
    if (members.size() < 2) {
      throw InvalidArgument("split_dataset: cell (class " + std::to_string(std::get<0>(key)) + ", jnr " +
                            std::to_string(std::get<1>(key)) + " dB) has fewer than 2 samples");
    }
    for (std::size_t i = members.size() - 1; i > 0; --i) {
      const auto j = static_cast<std::size_t>(rng.uniform_int(0, static_cast<std::int64_t>(i)));
      std::swap(members[i], members[j]);
    }
    const double wanted = std::ceil(train_fraction * static_cast<double>(members.size()) - 1e-9);
    const std::size_t n_train = std::min(members.size() - 1, static_cast<std::size_t>(wanted));
    split.train.insert(split.train.end(), members.begin(), members.begin() + n_train);
    split.test.insert(split.test.end(), members.begin() + n_train, members.end());
  }
  std::sort(split.train.begin(), split.train.end());
  std::sort(split.test.begin(), split.test.end());
  return split;
}

void save_dataset(const Dataset& dataset, const std::filesystem::path& dir) {
  if (dataset.labels.size() != dataset.manifest.records.size() ||
      dataset.pixels.size() != dataset.labels.size() * tf::kImagePixels) {
    throw InvalidArgument("save_dataset: inconsistent dataset");
  }
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) {
    throw PersistError("cannot create " + dir.string() + ": " + ec.message());
  }
  const auto payload_path = dir / kPayloadFile;
  const auto manifest_path = dir / kManifestFile;
  PartialFileGuard guard({payload_path, manifest_path});
  std::ofstream os(payload_path, std::ios::binary);
  if (!os) {
    throw PersistError("cannot open " + payload_path.string() + " for writing");
  }
  write_header(os, static_cast<std::uint32_t>(dataset.size()));
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    write_sample(os, dataset.labels[i], dataset.image(i));
  }
  os.close();
  if (!os) {
    throw PersistError("failed writing " + payload_path.string());
  }
  write_manifest(manifest_path, dataset.manifest);
  guard.release();
}

Dataset load_dataset(const std::filesystem::path& dir) {
  Dataset ds;
  ds.manifest = read_manifest(dir / kManifestFile);

  const auto payload_path = dir / kPayloadFile;
  std::ifstream is(payload_path, std::ios::binary);
  if (!is) {
    throw PersistError("cannot open " + payload_path.string());
  }
  io::Reader reader(is);
  reader.expect_magic(kMagic);
  const std::uint64_t count_at = reader.offset();
  const auto count = reader.read_le<std::uint32_t>("sample count");
  const std::uint64_t dims_at = reader.offset();
  const auto height = reader.read_le<std::uint16_t>("height");
  const auto width = reader.read_le<std::uint16_t>("width");
  if (height != tf::kImageSide || width != tf::kImageSide) {
    throw FormatError("payload: expected 128x128 images, got " + std::to_string(height) + "x" +
                          std::to_string(width),
                      dims_at);
  }
  if (count != ds.manifest.records.size()) {
    throw FormatError("payload: sample count " + std::to_string(count) + " disagrees with manifest (" +
                          std::to_string(ds.manifest.records.size()) + " records)",
                      count_at);
  }

  ds.labels.resize(count);
  ds.pixels.resize(static_cast<std::size_t>(count) * tf::kImagePixels);
  for (std::size_t i = 0; i < count; ++i) {
    const SampleRecord& rec = ds.manifest.records[i];
    if (rec.index != i || rec.offset != reader.offset()) {
      throw FormatError("payload: record " + std::to_string(i) + " offset mismatch", reader.offset());
    }
    const std::uint64_t label_at = reader.offset();
    ds.labels[i] = reader.read_le<std::uint8_t>("class id");
    if (ds.labels[i] != rec.class_id) {
      throw FormatError("payload: class id disagrees with manifest for sample " + std::to_string(i),
                        label_at);
    }
    reader.read_f32_array({ds.pixels.data() + i * tf::kImagePixels, tf::kImagePixels}, "pixels");
  }
  char extra;
  if (is.read(&extra, 1); is.gcount() != 0) {
    throw FormatError("payload: trailing bytes after last sample", reader.offset());
  }
  return ds;
}

}  // namespace jamforge::dataset
