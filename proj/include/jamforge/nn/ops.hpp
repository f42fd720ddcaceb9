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

#include <array>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include "jamforge/nn/tensor.hpp"

// Stateless layer kernels with hand-derived gradients. Every function is
// instantiated for float (training) and double (gradient checks).
namespace jamforge::nn {

enum class Mode { Train, Eval };

template <typename T>
struct Conv2dLayer {
  Tensor<T> weight;  // (out_ch, in_ch, kh, kw)
  Tensor<T> bias;    // (out_ch)
  std::array<std::size_t, 2> stride{1, 1};
  std::array<std::size_t, 2> padding{0, 0};

  Conv2dLayer() = default;
  Conv2dLayer(std::size_t in_ch, std::size_t out_ch, std::size_t kh, std::size_t kw,
              std::array<std::size_t, 2> stride_hw = {1, 1}, std::array<std::size_t, 2> padding_hw = {0, 0});

  std::size_t out_channels() const { return weight.dim(0); }
  std::size_t in_channels() const { return weight.dim(1); }
  std::size_t kernel_h() const { return weight.dim(2); }
  std::size_t kernel_w() const { return weight.dim(3); }

  /// (N, K, H', W') for an (N, C, H, W) input; throws on incompatible shapes.
  Shape output_shape(const Shape& input) const;
};

/// z[n,k,i,j] = sum_{c,u,v} x[n,c,i*sh+u-ph, j*sw+v-pw] w[k,c,u,v] + b[k].
template <typename T>
Tensor<T> conv2d_forward(const Tensor<T>& x, const Conv2dLayer<T>& layer);

template <typename T>
struct Conv2dGrads {
  Tensor<T> input;
  Tensor<T> weight;
  Tensor<T> bias;
};

template <typename T>
Conv2dGrads<T> conv2d_backward(const Tensor<T>& x, const Conv2dLayer<T>& layer, const Tensor<T>& grad_out);

template <typename T>
struct BatchNormLayer {
  Tensor<T> gamma;
  Tensor<T> beta;
  Tensor<T> running_mean;
  Tensor<T> running_var;
  double epsilon = 1e-5;
  double momentum = 0.1;
  Mode mode = Mode::Train;

  BatchNormLayer() = default;
  explicit BatchNormLayer(std::size_t channels);

  std::size_t channels() const { return gamma.size(); }
};

/// Per-channel normalization over (N, H, W). Train mode uses batch statistics
/// and updates the running estimates (unbiased variance); eval mode uses the
/// running estimates.
template <typename T>
Tensor<T> batchnorm_forward(const Tensor<T>& x, BatchNormLayer<T>& layer);

template <typename T>
struct BatchNormGrads {
  Tensor<T> input;
  Tensor<T> gamma;
  Tensor<T> beta;
};

/// Gradients for the mode the layer is in; train mode includes the
/// dependence of the batch statistics on x.
template <typename T>
BatchNormGrads<T> batchnorm_backward(const Tensor<T>& x, const BatchNormLayer<T>& layer,
                                     const Tensor<T>& grad_out);

/// f(v) = v / (1 + exp(-v)).
template <typename T>
Tensor<T> swish(const Tensor<T>& x);

template <typename T>
Tensor<T> swish_backward(const Tensor<T>& x, const Tensor<T>& grad_out);

inline constexpr std::size_t kPaddingCell = std::numeric_limits<std::size_t>::max();

template <typename T>
struct MaxPoolResult {
  Tensor<T> output;
  /// Flat input index chosen for each output cell, or kPaddingCell when a
  /// zero-padding cell won.
  std::vector<std::size_t> argmax;
};

/// Windowed maximum with zero padding. Ties go to the first maximal cell in
/// row-major window order.
template <typename T>
MaxPoolResult<T> maxpool2d_forward(const Tensor<T>& x, std::size_t window = 2, std::size_t stride = 2,
                                   std::size_t padding = 1);

template <typename T>
Tensor<T> maxpool2d_backward(const Tensor<T>& grad_out, std::span<const std::size_t> argmax,
                             const Shape& input_shape);

/// (N, C, H, W) -> (N, C) spatial mean.
template <typename T>
Tensor<T> global_avg_pool(const Tensor<T>& x);

template <typename T>
Tensor<T> global_avg_pool_backward(const Tensor<T>& grad_out, const Shape& input_shape);

/// x (N, D) * w (D, V) + b (V).
template <typename T>
Tensor<T> linear_forward(const Tensor<T>& x, const Tensor<T>& w, const Tensor<T>& b);

template <typename T>
struct LinearGrads {
  Tensor<T> input;
  Tensor<T> weight;
  Tensor<T> bias;
};

template <typename T>
LinearGrads<T> linear_backward(const Tensor<T>& x, const Tensor<T>& w, const Tensor<T>& grad_out);

template <typename T>
struct CrossEntropyResult {
  double loss = 0.0;
  Tensor<T> grad;  // d(mean loss)/d(logits)
};

/// Softmax cross-entropy averaged over the batch.
template <typename T>
CrossEntropyResult<T> cross_entropy(const Tensor<T>& logits, std::span<const int> labels);

/// Three parallel conv + BN branches (3x3, 1x3, 3x1) whose outputs are summed.
template <typename T>
struct AcbBlock {
  Conv2dLayer<T> conv_square;
  BatchNormLayer<T> bn_square;
  Conv2dLayer<T> conv_hor;
  BatchNormLayer<T> bn_hor;
  Conv2dLayer<T> conv_ver;
  BatchNormLayer<T> bn_ver;

  AcbBlock() = default;
  AcbBlock(std::size_t in_ch, std::size_t out_ch, std::size_t stride = 1);

  void set_mode(Mode mode);
};

template <typename T>
Tensor<T> acb_forward(const Tensor<T>& x, AcbBlock<T>& block);

/// Folds each branch's eval-mode BN into its kernel, embeds the 1x3 and 3x1
/// kernels at the centre row/column of a 3x3 kernel and sums the branches.
template <typename T>
Conv2dLayer<T> acb_fuse(const AcbBlock<T>& block);

/// Eval-mode BN folded into the preceding convolution.
template <typename T>
Conv2dLayer<T> fold_batchnorm(const Conv2dLayer<T>& conv, const BatchNormLayer<T>& bn);

}  // namespace jamforge::nn
