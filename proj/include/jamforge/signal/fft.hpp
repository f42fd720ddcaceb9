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

#include <span>

#include "jamforge/signal/types.hpp"

namespace jamforge {

enum class FftDirection { Forward, Inverse };

/// Unnormalized in-place DFT of any length, backed by FFTW. Plans are cached
/// per (length, direction); execution is safe from concurrent threads.
/// Forward uses exp(-j 2 pi k m / N); Inverse uses exp(+j ...) without 1/N.
void fft_inplace(std::span<Complex> data, FftDirection direction);

}  // namespace jamforge
