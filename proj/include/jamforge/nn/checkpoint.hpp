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
#include <iosfwd>
#include <optional>

#include "jamforge/nn/adam.hpp"
#include "jamforge/nn/model.hpp"

// Binary model checkpoint, all values little-endian:
//   "ACS1"  u32 version  u32 n_layers
//   per layer: u8 tag, u32 n_config, i64 config[n_config],
//              u32 n_tensors, per tensor { u32 rank, u32 dims[rank] }
//   f32 blobs of every tensor in manifest order
//   u8 has_optimizer; if set: u64 t, f64 lr, beta1, beta2, epsilon,
//              u32 n_moments, then per moment { u64 count, f32 m[count], f32 v[count] }
namespace jamforge::nn {

inline constexpr char kCheckpointMagic[5] = "ACS1";
inline constexpr std::uint32_t kCheckpointVersion = 1;

struct Checkpoint {
  Model<float> model;
  std::optional<AdamState<float>> optimizer;
};

void write_checkpoint(std::ostream& os, Model<float>& model, const AdamState<float>* optimizer);
Checkpoint read_checkpoint(std::istream& is);

/// Throws PersistError when the file cannot be written.
void save_checkpoint(const std::filesystem::path& path, Model<float>& model,
                     const AdamState<float>* optimizer = nullptr);
/// Throws PersistError when the file cannot be opened, FormatError on malformed content.
Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace jamforge::nn
