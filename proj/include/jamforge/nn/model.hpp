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
#include <memory>
#include <string>
#include <vector>

#include "jamforge/nn/ops.hpp"
#include "jamforge/signal/rng.hpp"

namespace jamforge::nn {

/// Learnable tensor and the gradient slot that backward() overwrites.
template <typename T>
struct ParamRef {
  std::string name;
  Tensor<T>* value = nullptr;
  Tensor<T>* grad = nullptr;
};

/// Checkpoint type tags.
enum class LayerTag : std::uint8_t {
  Conv2d = 1,
  BatchNorm = 2,
  Swish = 3,
  MaxPool = 4,
  GlobalAvgPool = 5,
  Linear = 6,
  Acb = 7,
};

std::string to_string(LayerTag tag);

/// A layer caches what its backward pass needs during forward(); backward()
/// must follow the forward() it differentiates.
template <typename T>
class Layer {
 public:
  virtual ~Layer() = default;

  virtual LayerTag tag() const = 0;
  virtual std::unique_ptr<Layer> clone() const = 0;

  virtual Shape output_shape(const Shape& input) const = 0;
  virtual Tensor<T> forward(Tensor<T> x) = 0;
  /// Returns d(loss)/d(input) and overwrites the parameter gradients.
  virtual Tensor<T> backward(const Tensor<T>& grad_out) = 0;

  virtual void set_mode(Mode) {}
  virtual std::vector<ParamRef<T>> parameters() { return {}; }
  /// Every persisted tensor (parameters and running statistics) in manifest order.
  virtual std::vector<Tensor<T>*> state_tensors() { return {}; }
  /// Integer configuration that reconstructs the layer, see make_layer().
  virtual std::vector<std::int64_t> config() const { return {}; }
  /// Operation count of one forward pass for the given input shape.
  virtual std::uint64_t flops(const Shape&) const { return 0; }
};

template <typename T>
class Conv2d final : public Layer<T> {
 public:
  explicit Conv2d(Conv2dLayer<T> params);
  Conv2d(std::size_t in_ch, std::size_t out_ch, std::size_t kh, std::size_t kw,
         std::array<std::size_t, 2> stride = {1, 1}, std::array<std::size_t, 2> padding = {0, 0});

  LayerTag tag() const override { return LayerTag::Conv2d; }
  std::unique_ptr<Layer<T>> clone() const override;
  Shape output_shape(const Shape& input) const override { return p_.output_shape(input); }
  Tensor<T> forward(Tensor<T> x) override;
  Tensor<T> backward(const Tensor<T>& grad_out) override;
  std::vector<ParamRef<T>> parameters() override;
  std::vector<Tensor<T>*> state_tensors() override { return {&p_.weight, &p_.bias}; }
  std::vector<std::int64_t> config() const override;
  std::uint64_t flops(const Shape& input) const override;

  Conv2dLayer<T>& params() { return p_; }
  const Conv2dLayer<T>& params() const { return p_; }

 private:
  Conv2dLayer<T> p_;
  Conv2dLayer<T> grad_;
  Tensor<T> input_;
};

template <typename T>
class BatchNorm2d final : public Layer<T> {
 public:
  explicit BatchNorm2d(std::size_t channels);
  explicit BatchNorm2d(BatchNormLayer<T> params) : p_(std::move(params)), grad_(p_) {}

  LayerTag tag() const override { return LayerTag::BatchNorm; }
  std::unique_ptr<Layer<T>> clone() const override;
  Shape output_shape(const Shape& input) const override;
  Tensor<T> forward(Tensor<T> x) override;
  Tensor<T> backward(const Tensor<T>& grad_out) override;
  void set_mode(Mode mode) override { p_.mode = mode; }
  std::vector<ParamRef<T>> parameters() override;
  std::vector<Tensor<T>*> state_tensors() override {
    return {&p_.gamma, &p_.beta, &p_.running_mean, &p_.running_var};
  }
  std::vector<std::int64_t> config() const override;

  BatchNormLayer<T>& params() { return p_; }
  const BatchNormLayer<T>& params() const { return p_; }

 private:
  BatchNormLayer<T> p_;
  BatchNormLayer<T> grad_;
  Tensor<T> input_;
};

template <typename T>
class Swish final : public Layer<T> {
 public:
  LayerTag tag() const override { return LayerTag::Swish; }
  std::unique_ptr<Layer<T>> clone() const override { return std::make_unique<Swish>(*this); }
  Shape output_shape(const Shape& input) const override { return input; }
  Tensor<T> forward(Tensor<T> x) override;
  Tensor<T> backward(const Tensor<T>& grad_out) override;

 private:
  Tensor<T> input_;
};

template <typename T>
class MaxPool2d final : public Layer<T> {
 public:
  MaxPool2d(std::size_t window = 2, std::size_t stride = 2, std::size_t padding = 1);

  LayerTag tag() const override { return LayerTag::MaxPool; }
  std::unique_ptr<Layer<T>> clone() const override { return std::make_unique<MaxPool2d>(*this); }
  Shape output_shape(const Shape& input) const override;
  Tensor<T> forward(Tensor<T> x) override;
  Tensor<T> backward(const Tensor<T>& grad_out) override;
  std::vector<std::int64_t> config() const override;

 private:
  std::size_t window_, stride_, padding_;
  Shape input_shape_;
  std::vector<std::size_t> argmax_;
};

template <typename T>
class GlobalAvgPool final : public Layer<T> {
 public:
  LayerTag tag() const override { return LayerTag::GlobalAvgPool; }
  std::unique_ptr<Layer<T>> clone() const override { return std::make_unique<GlobalAvgPool>(*this); }
  Shape output_shape(const Shape& input) const override;
  Tensor<T> forward(Tensor<T> x) override;
  Tensor<T> backward(const Tensor<T>& grad_out) override;

 private:
  Shape input_shape_;
};

template <typename T>
class Linear final : public Layer<T> {
 public:
  Linear(std::size_t in_features, std::size_t out_features);

  LayerTag tag() const override { return LayerTag::Linear; }
  std::unique_ptr<Layer<T>> clone() const override { return std::make_unique<Linear>(*this); }
  Shape output_shape(const Shape& input) const override;
  Tensor<T> forward(Tensor<T> x) override;
  Tensor<T> backward(const Tensor<T>& grad_out) override;
  std::vector<ParamRef<T>> parameters() override;
  std::vector<Tensor<T>*> state_tensors() override { return {&weight_, &bias_}; }
  std::vector<std::int64_t> config() const override;
  std::uint64_t flops(const Shape& input) const override;

  Tensor<T>& weight() { return weight_; }
  Tensor<T>& bias() { return bias_; }

 private:
  Tensor<T> weight_;  // (in, out)
  Tensor<T> bias_;    // (out)
  Tensor<T> grad_weight_;
  Tensor<T> grad_bias_;
  Tensor<T> input_;
};

template <typename T>
class Acb final : public Layer<T> {
 public:
  Acb(std::size_t in_ch, std::size_t out_ch, std::size_t stride = 1);
  explicit Acb(AcbBlock<T> block);

  LayerTag tag() const override { return LayerTag::Acb; }
  std::unique_ptr<Layer<T>> clone() const override { return std::make_unique<Acb>(*this); }
  Shape output_shape(const Shape& input) const override;
  Tensor<T> forward(Tensor<T> x) override;
  Tensor<T> backward(const Tensor<T>& grad_out) override;
  void set_mode(Mode mode) override { block_.set_mode(mode); }
  std::vector<ParamRef<T>> parameters() override;
  std::vector<Tensor<T>*> state_tensors() override;
  std::vector<std::int64_t> config() const override;
  std::uint64_t flops(const Shape& input) const override;

  AcbBlock<T>& block() { return block_; }
  const AcbBlock<T>& block() const { return block_; }

 private:
  AcbBlock<T> block_;
  AcbBlock<T> grad_;
  Tensor<T> input_;
  Tensor<T> pre_bn_[3];
};

/// Rebuilds a layer from its tag and config(); tensors are zero/identity
/// initialized and are expected to be overwritten from a checkpoint.
template <typename T>
std::unique_ptr<Layer<T>> make_layer(LayerTag tag, const std::vector<std::int64_t>& config);

/// Sequential stack of layers.
template <typename T>
class Model {
 public:
  Model() = default;
  Model(const Model& other);
  Model& operator=(const Model& other);
  Model(Model&&) noexcept = default;
  Model& operator=(Model&&) noexcept = default;

  void add(std::unique_ptr<Layer<T>> layer) { layers_.push_back(std::move(layer)); }
  template <typename L, typename... Args>
  L& emplace(Args&&... args) {
    auto layer = std::make_unique<L>(std::forward<Args>(args)...);
    L& ref = *layer;
    layers_.push_back(std::move(layer));
    return ref;
  }

  std::size_t size() const noexcept { return layers_.size(); }
  bool empty() const noexcept { return layers_.empty(); }
  Layer<T>& layer(std::size_t i) { return *layers_.at(i); }
  const Layer<T>& layer(std::size_t i) const { return *layers_.at(i); }

  void set_mode(Mode mode);
  Shape output_shape(const Shape& input) const;
  Tensor<T> forward(Tensor<T> x);
  Tensor<T> backward(const Tensor<T>& grad_out);
  std::vector<ParamRef<T>> parameters();
  std::vector<Tensor<T>*> state_tensors();

 private:
  std::vector<std::unique_ptr<Layer<T>>> layers_;
};

/// Conv layers cost 2 * H_out * W_out * kh * kw * C_in * C_out, linear layers
/// (2 * C_in - 1) * C_out, everything else 0. Throws when a shape cannot be
/// propagated.
template <typename T>
std::uint64_t count_flops(const Model<T>& model, const Shape& input_shape);

/// Learnable scalars; BN running statistics excluded.
template <typename T>
std::uint64_t count_params(Model<T>& model);

/// Copy of `model` with every ACB replaced by its fused 3x3 convolution.
template <typename T>
Model<T> fuse_acbs(const Model<T>& model);

/// Glorot-uniform conv and linear weights, zero biases, identity BN.
template <typename T>
void init_parameters(Model<T>& model, Rng& rng);

}  // namespace jamforge::nn
