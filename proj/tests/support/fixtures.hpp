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

// Small in-memory datasets for tests that do not need the on-disk format.

#include <algorithm>

#include "jamforge/dataset/dataset.hpp"

namespace jamforge::fixture {

inline dataset::Dataset build_dataset(const dataset::DatasetConfig& cfg) {
  dataset::Dataset d;
  d.manifest.config = cfg;
  d.manifest.records = dataset::plan_records(cfg);
  d.pixels.reserve(d.manifest.records.size() * tf::kImagePixels);
  for (dataset::SampleRecord& r : d.manifest.records) {
    const tf::Spectrogram s = dataset::generate_sample(cfg, r);
    r.offset = dataset::payload_offset(r.index);
    d.labels.push_back(static_cast<std::uint8_t>(r.class_id));
    d.pixels.insert(d.pixels.end(), s.pixels.begin(), s.pixels.end());
  }
  return d;
}

inline dataset::DatasetConfig toy_config(std::vector<int> classes, std::vector<double> jnr, int samples,
                                         std::uint64_t seed) {
  dataset::DatasetConfig cfg;
  cfg.classes = std::move(classes);
  cfg.jnr_grid_db = std::move(jnr);
  cfg.samples_per_class_per_jnr = samples;
  cfg.master_seed = seed;
  return cfg;
}

}  // namespace jamforge::fixture
