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

#include <bit>
#include <cstdint>
#include <cstring>
#include <istream>
#include <ostream>
#include <span>
#include <string>
#include <type_traits>
#include <utility>
#include <vector>

#include "jamforge/errors.hpp"

// Little-endian primitives shared by the dataset and checkpoint formats.
namespace jamforge::io {

template <typename T>
  requires std::is_arithmetic_v<T>
void write_le(std::ostream& os, T value) {
  unsigned char bytes[sizeof(T)];
  std::memcpy(bytes, &value, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) {
    for (std::size_t i = 0; i < sizeof(T) / 2; ++i) {
      std::swap(bytes[i], bytes[sizeof(T) - 1 - i]);
    }
  }
  os.write(reinterpret_cast<const char*>(bytes), sizeof(T));
}

inline void write_f32_array(std::ostream& os, std::span<const float> values) {
  if constexpr (std::endian::native == std::endian::little) {
    os.write(reinterpret_cast<const char*>(values.data()),
             static_cast<std::streamsize>(values.size() * sizeof(float)));
  } else {
    for (float v : values) {
      write_le(os, v);
    }
  }
}

/// Reads from a stream while tracking the absolute byte offset, so format
/// errors can name where they occurred.
class Reader {
 public:
  explicit Reader(std::istream& is, std::uint64_t offset = 0) : is_(is), offset_(offset) {}

  std::uint64_t offset() const noexcept { return offset_; }

  void read_bytes(void* dst, std::size_t count, const char* what) {
    is_.read(static_cast<char*>(dst), static_cast<std::streamsize>(count));
    const auto got = static_cast<std::size_t>(is_.gcount());
    if (got != count) {
      throw FormatError(std::string("truncated data while reading ") + what, offset_ + got);
    }
    offset_ += count;
  }

  template <typename T>
    requires std::is_arithmetic_v<T>
  T read_le(const char* what) {
    unsigned char bytes[sizeof(T)];
    read_bytes(bytes, sizeof(T), what);
    if constexpr (std::endian::native == std::endian::big) {
      for (std::size_t i = 0; i < sizeof(T) / 2; ++i) {
        std::swap(bytes[i], bytes[sizeof(T) - 1 - i]);
      }
    }
    T value;
    std::memcpy(&value, bytes, sizeof(T));
    return value;
  }

  void read_f32_array(std::span<float> dst, const char* what) {
    read_bytes(dst.data(), dst.size() * sizeof(float), what);
    if constexpr (std::endian::native == std::endian::big) {
      for (float& v : dst) {
        unsigned char b[4];
        std::memcpy(b, &v, 4);
        std::swap(b[0], b[3]);
        std::swap(b[1], b[2]);
        std::memcpy(&v, b, 4);
      }
    }
  }

  void expect_magic(const char (&magic)[5]) {
    const std::uint64_t at = offset_;
    char got[4] = {0, 0, 0, 0};
    is_.read(got, 4);
    const auto n = static_cast<std::size_t>(is_.gcount());
    offset_ += n;
    if (n != 4 || std::memcmp(got, magic, 4) != 0) {
      throw FormatError(std::string("bad magic: expected \"") + magic + "\"", at);
    }
  }

 private:
  std::istream& is_;
  std::uint64_t offset_;
};

}  // namespace jamforge::io
