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

#include "jamforge/tf/spectrogram.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <string>

#include "jamforge/errors.hpp"
#include "jamforge/io/binary.hpp"

namespace jamforge::tf {

Spectrogram to_spectrogram(const TimeFrequencyMap& tf, int label, SampleMeta meta) {
  if (tf.frames != kImageSide || tf.bins != kImageSide || tf.values.size() != kImagePixels) {
    throw InvalidArgument("to_spectrogram: expected a 128x128 map, got " + std::to_string(tf.frames) +
                          "x" + std::to_string(tf.bins));
  }
  std::vector<double> compressed(kImagePixels);
  for (std::size_t i = 0; i < kImagePixels; ++i) {
    compressed[i] = std::log1p(std::abs(tf.values[i]));
  }
  const auto [lo_it, hi_it] = std::minmax_element(compressed.begin(), compressed.end());
  const double lo = *lo_it;
  const double span = *hi_it - lo;

  Spectrogram out;
  out.label = label;
  out.meta = std::move(meta);
  out.pixels.assign(kImagePixels, 0.0f);
  if (!(span > 0.0)) {
    out.meta.degenerate = true;
    return out;
  }
  for (std::size_t frame = 0; frame < kImageSide; ++frame) {
    for (std::size_t bin = 0; bin < kImageSide; ++bin) {
      const double v = (compressed[frame * kImageSide + bin] - lo) / span;
      out.pixels[bin * kImageSide + frame] = static_cast<float>(v);
    }
  }
  return out;
}

void write_pgm(const std::filesystem::path& path, std::span<const float> pixels, std::size_t height,
               std::size_t width) {
  if (pixels.size() != height * width) {
    throw InvalidArgument("write_pgm: pixel count does not match dimensions");
  }
  std::ofstream os(path, std::ios::binary);
  if (!os) {
    throw PersistError("cannot open " + path.string() + " for writing");
  }
  os << "P5\n" << width << ' ' << height << "\n255\n";
  std::vector<unsigned char> bytes(pixels.size());
  for (std::size_t i = 0; i < pixels.size(); ++i) {
    const double v = std::clamp(static_cast<double>(pixels[i]), 0.0, 1.0);
    bytes[i] = static_cast<unsigned char>(std::lround(255.0 * v));
  }
  os.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!os) {
    throw PersistError("failed writing " + path.string());
  }
}

void write_raw_f32(const std::filesystem::path& path, std::span<const float> pixels) {
  std::ofstream os(path, std::ios::binary);
  if (!os) {
    throw PersistError("cannot open " + path.string() + " for writing");
  }
  io::write_f32_array(os, pixels);
  if (!os) {
    throw PersistError("failed writing " + path.string());
  }
}

}  // namespace jamforge::tf
