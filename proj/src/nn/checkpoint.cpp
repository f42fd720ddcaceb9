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

#include "jamforge/nn/checkpoint.hpp"

#include <fstream>
#include <string>
#include <vector>

#include "jamforge/io/binary.hpp"

namespace jamforge::nn {
namespace {

constexpr std::uint32_t kMaxConfig = 64;
constexpr std::uint32_t kMaxTensors = 64;
constexpr std::uint32_t kMaxRank = 8;

void write_tensor(std::ostream& os, const Tensor<float>& t) { io::write_f32_array(os, t.values()); }

}  // namespace

void write_checkpoint(std::ostream& os, Model<float>& model, const AdamState<float>* optimizer) {
  os.write(kCheckpointMagic, 4);
  io::write_le<std::uint32_t>(os, kCheckpointVersion);
  io::write_le<std::uint32_t>(os, static_cast<std::uint32_t>(model.size()));
  for (std::size_t i = 0; i < model.size(); ++i) {
    Layer<float>& layer = model.layer(i);
    io::write_le<std::uint8_t>(os, static_cast<std::uint8_t>(layer.tag()));
    const std::vector<std::int64_t> cfg = layer.config();
    io::write_le<std::uint32_t>(os, static_cast<std::uint32_t>(cfg.size()));
    for (std::int64_t v : cfg) io::write_le<std::int64_t>(os, v);
    const std::vector<Tensor<float>*> tensors = layer.state_tensors();
    io::write_le<std::uint32_t>(os, static_cast<std::uint32_t>(tensors.size()));
    for (const Tensor<float>* t : tensors) {
      io::write_le<std::uint32_t>(os, static_cast<std::uint32_t>(t->rank()));
      for (std::size_t d : t->shape()) io::write_le<std::uint32_t>(os, static_cast<std::uint32_t>(d));
    }
  }
  for (const Tensor<float>* t : model.state_tensors()) write_tensor(os, *t);

  io::write_le<std::uint8_t>(os, optimizer ? 1 : 0);
  if (optimizer) {
    io::write_le<std::uint64_t>(os, optimizer->t);
    io::write_le<double>(os, optimizer->lr);
    io::write_le<double>(os, optimizer->beta1);
    io::write_le<double>(os, optimizer->beta2);
    io::write_le<double>(os, optimizer->epsilon);
    io::write_le<std::uint32_t>(os, static_cast<std::uint32_t>(optimizer->m.size()));
    for (std::size_t i = 0; i < optimizer->m.size(); ++i) {
      io::write_le<std::uint64_t>(os, optimizer->m[i].size());
      write_tensor(os, optimizer->m[i]);
      write_tensor(os, optimizer->v[i]);
    }
  }
}

Checkpoint read_checkpoint(std::istream& is) {
  io::Reader rd(is);
  rd.expect_magic(kCheckpointMagic);
  const std::uint64_t version_at = rd.offset();
  const auto version = rd.read_le<std::uint32_t>("version");
  if (version != kCheckpointVersion) {
    throw FormatError("unsupported checkpoint version " + std::to_string(version), version_at);
  }
  const auto n_layers = rd.read_le<std::uint32_t>("layer count");

  Checkpoint ck;
  for (std::uint32_t i = 0; i < n_layers; ++i) {
    const std::uint64_t layer_at = rd.offset();
    const auto tag = static_cast<LayerTag>(rd.read_le<std::uint8_t>("layer tag"));
    const auto n_cfg = rd.read_le<std::uint32_t>("config count");
    if (n_cfg > kMaxConfig) {
      throw FormatError("implausible config count " + std::to_string(n_cfg), layer_at);
    }
    std::vector<std::int64_t> cfg(n_cfg);
    for (auto& v : cfg) v = rd.read_le<std::int64_t>("layer config");

    std::unique_ptr<Layer<float>> layer;
    try {
      layer = make_layer<float>(tag, cfg);
    } catch (const InvalidArgument& e) {
      throw FormatError(std::string("bad layer ") + std::to_string(i) + ": " + e.what(), layer_at);
    }

    const std::uint64_t tensors_at = rd.offset();
    const auto n_tensors = rd.read_le<std::uint32_t>("tensor count");
    const std::vector<Tensor<float>*> expected = layer->state_tensors();
    if (n_tensors > kMaxTensors || n_tensors != expected.size()) {
      throw FormatError("layer " + std::to_string(i) + " (" + to_string(tag) + ") declares " +
                            std::to_string(n_tensors) + " tensors, expected " + std::to_string(expected.size()),
                        tensors_at);
    }
    for (const Tensor<float>* t : expected) {
      const std::uint64_t shape_at = rd.offset();
      const auto rank = rd.read_le<std::uint32_t>("tensor rank");
      if (rank > kMaxRank) {
        throw FormatError("implausible tensor rank " + std::to_string(rank), shape_at);
      }
      Shape shape(rank);
      for (auto& d : shape) d = rd.read_le<std::uint32_t>("tensor dim");
      if (shape != t->shape()) {
        throw FormatError("layer " + std::to_string(i) + " tensor shape " + shape_str(shape) +
                              " does not match its config, expected " + shape_str(t->shape()),
                          shape_at);
      }
    }
    ck.model.add(std::move(layer));
  }

  for (Tensor<float>* t : ck.model.state_tensors()) rd.read_f32_array(t->values(), "parameter blob");

  const std::uint64_t opt_at = rd.offset();
  const auto has_opt = rd.read_le<std::uint8_t>("optimizer flag");
  if (has_opt > 1) {
    throw FormatError("bad optimizer flag", opt_at);
  }
  if (has_opt == 1) {
    AdamState<float> st;
    st.t = rd.read_le<std::uint64_t>("adam step");
    st.lr = rd.read_le<double>("adam lr");
    st.beta1 = rd.read_le<double>("adam beta1");
    st.beta2 = rd.read_le<double>("adam beta2");
    st.epsilon = rd.read_le<double>("adam epsilon");
    const std::uint64_t count_at = rd.offset();
    const auto n_moments = rd.read_le<std::uint32_t>("moment count");
    const std::vector<ParamRef<float>> params = ck.model.parameters();
    if (n_moments != 0 && n_moments != params.size()) {
      throw FormatError("optimizer holds " + std::to_string(n_moments) + " moments for " +
                            std::to_string(params.size()) + " parameters",
                        count_at);
    }
    for (std::uint32_t i = 0; i < n_moments; ++i) {
      const std::uint64_t size_at = rd.offset();
      const auto count = rd.read_le<std::uint64_t>("moment size");
      if (count != params[i].value->size()) {
        throw FormatError("moment " + std::to_string(i) + " has " + std::to_string(count) +
                              " values, parameter " + params[i].name + " has " +
                              std::to_string(params[i].value->size()),
                          size_at);
      }
      st.m.emplace_back(params[i].value->shape());
      st.v.emplace_back(params[i].value->shape());
      rd.read_f32_array(st.m.back().values(), "adam m");
      rd.read_f32_array(st.v.back().values(), "adam v");
    }
    ck.optimizer = std::move(st);
  }
  if (is.peek() != std::char_traits<char>::eof()) {
    throw FormatError("trailing bytes after checkpoint", rd.offset());
  }
  return ck;
}

void save_checkpoint(const std::filesystem::path& path, Model<float>& model, const AdamState<float>* optimizer) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) {
    throw PersistError("cannot open " + path.string() + " for writing");
  }
  write_checkpoint(os, model, optimizer);
  os.flush();
  if (!os) {
    throw PersistError("write failed for " + path.string());
  }
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) {
    throw PersistError("cannot open " + path.string());
  }
  return read_checkpoint(is);
}

}  // namespace jamforge::nn
