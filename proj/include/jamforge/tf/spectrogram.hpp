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

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <vector>

#include "jamforge/signal/types.hpp"
#include "jamforge/tf/cwd.hpp"

namespace jamforge::tf {

inline constexpr std::size_t kImageSide = 128;
inline constexpr std::size_t kImagePixels = kImageSide * kImageSide;

/// Provenance of one spectrogram.
struct SampleMeta {
  std::optional<CompoundSpec> spec;
  double jnr_db = 0.0;
  double pr_db = 0.0;
  std::uint64_t seed = 0;
  bool degenerate = false;
};

/// 128x128 image in [0, 1], row-major with frequency rows ascending from bin 0
/// and time along columns.
struct Spectrogram {
  std::vector<float> pixels;
  int label = 0;
  SampleMeta meta;

  float at(std::size_t freq_row, std::size_t time_col) const {
    return pixels[freq_row * kImageSide + time_col];
  }
};

/// |v| -> log(1 + |v|) -> per-image min-max to [0, 1] -> (freq, time) layout.
/// A constant map yields an all-zero image with meta.degenerate set.
Spectrogram to_spectrogram(const TimeFrequencyMap& tf, int label, SampleMeta meta = {});

/// Binary PGM (P5, maxval 255, pixel = round(255 v)).
void write_pgm(const std::filesystem::path& path, std::span<const float> pixels, std::size_t height,
               std::size_t width);

/// Raw little-endian float32 grid.
void write_raw_f32(const std::filesystem::path& path, std::span<const float> pixels);

}  // namespace jamforge::tf
