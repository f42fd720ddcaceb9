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

#include "jamforge/nn/adam.hpp"

#include <cmath>
#include <string>

namespace jamforge::nn {

template <typename T>
void adam_step(std::span<const ParamRef<T>> params, AdamState<T>& state) {
  if (state.m.empty() && state.v.empty()) {
    for (const ParamRef<T>& p : params) {
      state.m.emplace_back(p.value->shape());
      state.v.emplace_back(p.value->shape());
    }
  }
  if (state.m.size() != params.size() || state.v.size() != params.size()) {
    throw InvalidArgument("adam_step: optimizer state holds " + std::to_string(state.m.size()) +
                          " moments for " + std::to_string(params.size()) + " parameters");
  }
  for (std::size_t i = 0; i < params.size(); ++i) {
    const ParamRef<T>& p = params[i];
    if (p.grad->shape() != p.value->shape() || state.m[i].shape() != p.value->shape() ||
        state.v[i].shape() != p.value->shape()) {
      throw InvalidArgument("adam_step: shape mismatch for parameter " + p.name);
    }
    for (std::size_t k = 0; k < p.grad->size(); ++k) {
      if (!std::isfinite(static_cast<double>((*p.grad)[k]))) {
        throw NumericDomainError("adam_step: non-finite gradient in parameter " + p.name + " at element " +
                                 std::to_string(k));
      }
    }
  }

  state.t += 1;
  const double t = static_cast<double>(state.t);
  const double c1 = 1.0 - std::pow(state.beta1, t);
  const double c2 = 1.0 - std::pow(state.beta2, t);
  for (std::size_t i = 0; i < params.size(); ++i) {
    Tensor<T>& value = *params[i].value;
    const Tensor<T>& grad = *params[i].grad;
    Tensor<T>& m = state.m[i];
    Tensor<T>& v = state.v[i];
    for (std::size_t k = 0; k < value.size(); ++k) {
      const double g = grad[k];
      const double mk = state.beta1 * m[k] + (1.0 - state.beta1) * g;
      const double vk = state.beta2 * v[k] + (1.0 - state.beta2) * g * g;
      m[k] = static_cast<T>(mk);
      v[k] = static_cast<T>(vk);
      if (state.lr != 0.0) {
        const double step = state.lr * (mk / c1) / (std::sqrt(vk / c2) + state.epsilon);
        value[k] = static_cast<T>(value[k] - step);
      }
    }
  }
}

template void adam_step(std::span<const ParamRef<float>>, AdamState<float>&);
template void adam_step(std::span<const ParamRef<double>>, AdamState<double>&);

}  // namespace jamforge::nn
