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
#include <span>
#include <vector>

#include "jamforge/nn/model.hpp"

namespace jamforge::nn {

template <typename T>
struct AdamState {
  double lr = 0.01;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  std::uint64_t t = 0;
  /// One moment tensor per parameter, allocated on the first step.
  std::vector<Tensor<T>> m;
  std::vector<Tensor<T>> v;
};

/// One bias-corrected Adam update over `params` using their gradient slots.
/// All gradients are checked before anything is modified; a non-finite
/// gradient throws NumericDomainError naming the parameter.
template <typename T>
void adam_step(std::span<const ParamRef<T>> params, AdamState<T>& state);

}  // namespace jamforge::nn
