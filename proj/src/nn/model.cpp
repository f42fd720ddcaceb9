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

#include "jamforge/nn/model.hpp"

#include <bit>
#include <cmath>
#include <string>

namespace jamforge::nn {
namespace {

std::int64_t bits_of(double v) { return std::bit_cast<std::int64_t>(v); }
double double_of(std::int64_t v) { return std::bit_cast<double>(v); }

std::size_t as_size(std::int64_t v, const char* what) {
  if (v < 1) {
    throw InvalidArgument(std::string("make_layer: ") + what + " must be positive, got " + std::to_string(v));
  }
  return static_cast<std::size_t>(v);
}

std::size_t as_count(std::int64_t v, const char* what) {
  if (v < 0) {
    throw InvalidArgument(std::string("make_layer: ") + what + " must be non-negative");
  }
  return static_cast<std::size_t>(v);
}

void expect_config(const std::vector<std::int64_t>& cfg, std::size_t n, LayerTag tag) {
  if (cfg.size() != n) {
    throw InvalidArgument("make_layer: " + to_string(tag) + " expects " + std::to_string(n) +
                          " config values, got " + std::to_string(cfg.size()));
  }
}

Mode mode_of(std::int64_t v) {
  if (v != 0 && v != 1) {
    throw InvalidArgument("make_layer: mode flag must be 0 or 1");
  }
  return v == 0 ? Mode::Train : Mode::Eval;
}

std::int64_t mode_flag(Mode m) { return m == Mode::Train ? 0 : 1; }

template <typename T>
Conv2dLayer<T> zero_like(const Conv2dLayer<T>& p) {
  Conv2dLayer<T> g = p;
  g.weight.fill(T(0));
  g.bias.fill(T(0));
  return g;
}

template <typename T>
BatchNormLayer<T> zero_like(const BatchNormLayer<T>& p) {
  BatchNormLayer<T> g = p;
  g.gamma.fill(T(0));
  g.beta.fill(T(0));
  return g;
}

template <typename T>
void push_conv(std::vector<ParamRef<T>>& out, const std::string& prefix, Conv2dLayer<T>& p, Conv2dLayer<T>& g) {
  out.push_back({prefix + "weight", &p.weight, &g.weight});
  out.push_back({prefix + "bias", &p.bias, &g.bias});
}

template <typename T>
void push_bn(std::vector<ParamRef<T>>& out, const std::string& prefix, BatchNormLayer<T>& p,
             BatchNormLayer<T>& g) {
  out.push_back({prefix + "gamma", &p.gamma, &g.gamma});
  out.push_back({prefix + "beta", &p.beta, &g.beta});
}

template <typename T>
std::uint64_t conv_flops(const Shape& out, std::size_t kernel_area, std::size_t in_ch, std::size_t out_ch) {
  return 2ULL * out[0] * out[2] * out[3] * kernel_area * in_ch * out_ch;
}

template <typename T>
void glorot(Tensor<T>& w, std::size_t fan_in, std::size_t fan_out, Rng& rng) {
  const double a = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
  for (std::size_t i = 0; i < w.size(); ++i) {
    w[i] = static_cast<T>(rng.uniform(-a, a));
  }
}

template <typename T>
void init_conv(Conv2dLayer<T>& p, Rng& rng) {
  const std::size_t area = p.kernel_h() * p.kernel_w();
  glorot(p.weight, p.in_channels() * area, p.out_channels() * area, rng);
  p.bias.fill(T(0));
}

template <typename T>
void init_bn(BatchNormLayer<T>& p) {
  p.gamma.fill(T(1));
  p.beta.fill(T(0));
  p.running_mean.fill(T(0));
  p.running_var.fill(T(1));
}

}  // namespace

std::string to_string(LayerTag tag) {
  switch (tag) {
    case LayerTag::Conv2d: return "Conv2d";
    case LayerTag::BatchNorm: return "BatchNorm2d";
    case LayerTag::Swish: return "Swish";
    case LayerTag::MaxPool: return "MaxPool2d";
    case LayerTag::GlobalAvgPool: return "GlobalAvgPool";
    case LayerTag::Linear: return "Linear";
    case LayerTag::Acb: return "Acb";
  }
  return "Unknown(" + std::to_string(static_cast<int>(tag)) + ")";
}

// ---------------------------------------------------------------------------
// Conv2d

template <typename T>
Conv2d<T>::Conv2d(Conv2dLayer<T> params) : p_(std::move(params)), grad_(zero_like(p_)) {}

template <typename T>
Conv2d<T>::Conv2d(std::size_t in_ch, std::size_t out_ch, std::size_t kh, std::size_t kw,
                  std::array<std::size_t, 2> stride, std::array<std::size_t, 2> padding)
    : Conv2d(Conv2dLayer<T>(in_ch, out_ch, kh, kw, stride, padding)) {}

template <typename T>
std::unique_ptr<Layer<T>> Conv2d<T>::clone() const {
  return std::make_unique<Conv2d>(*this);
}

template <typename T>
Tensor<T> Conv2d<T>::forward(Tensor<T> x) {
  input_ = std::move(x);
  return conv2d_forward(input_, p_);
}

template <typename T>
Tensor<T> Conv2d<T>::backward(const Tensor<T>& grad_out) {
  Conv2dGrads<T> g = conv2d_backward(input_, p_, grad_out);
  grad_.weight = std::move(g.weight);
  grad_.bias = std::move(g.bias);
  return std::move(g.input);
}

template <typename T>
std::vector<ParamRef<T>> Conv2d<T>::parameters() {
  std::vector<ParamRef<T>> out;
  push_conv(out, "", p_, grad_);
  return out;
}

template <typename T>
std::vector<std::int64_t> Conv2d<T>::config() const {
  return {static_cast<std::int64_t>(p_.in_channels()), static_cast<std::int64_t>(p_.out_channels()),
          static_cast<std::int64_t>(p_.kernel_h()),    static_cast<std::int64_t>(p_.kernel_w()),
          static_cast<std::int64_t>(p_.stride[0]),     static_cast<std::int64_t>(p_.stride[1]),
          static_cast<std::int64_t>(p_.padding[0]),    static_cast<std::int64_t>(p_.padding[1])};
}

template <typename T>
std::uint64_t Conv2d<T>::flops(const Shape& input) const {
  return conv_flops<T>(p_.output_shape(input), p_.kernel_h() * p_.kernel_w(), p_.in_channels(),
                       p_.out_channels());
}

// ---------------------------------------------------------------------------
// BatchNorm2d

template <typename T>
BatchNorm2d<T>::BatchNorm2d(std::size_t channels) : p_(channels), grad_(zero_like(p_)) {}

template <typename T>
std::unique_ptr<Layer<T>> BatchNorm2d<T>::clone() const {
  return std::make_unique<BatchNorm2d>(*this);
}

template <typename T>
Shape BatchNorm2d<T>::output_shape(const Shape& input) const {
  if (input.size() < 2 || input[1] != p_.channels()) {
    throw InvalidArgument("batchnorm: input " + shape_str(input) + " does not have " +
                          std::to_string(p_.channels()) + " channels");
  }
  return input;
}

template <typename T>
Tensor<T> BatchNorm2d<T>::forward(Tensor<T> x) {
  input_ = std::move(x);
  return batchnorm_forward(input_, p_);
}

template <typename T>
Tensor<T> BatchNorm2d<T>::backward(const Tensor<T>& grad_out) {
  BatchNormGrads<T> g = batchnorm_backward(input_, p_, grad_out);
  grad_.gamma = std::move(g.gamma);
  grad_.beta = std::move(g.beta);
  return std::move(g.input);
}

template <typename T>
std::vector<ParamRef<T>> BatchNorm2d<T>::parameters() {
  std::vector<ParamRef<T>> out;
  push_bn(out, "", p_, grad_);
  return out;
}

template <typename T>
std::vector<std::int64_t> BatchNorm2d<T>::config() const {
  return {static_cast<std::int64_t>(p_.channels()), bits_of(p_.epsilon), bits_of(p_.momentum), mode_flag(p_.mode)};
}

// ---------------------------------------------------------------------------
// Swish

template <typename T>
Tensor<T> Swish<T>::forward(Tensor<T> x) {
  input_ = std::move(x);
  return swish(input_);
}

template <typename T>
Tensor<T> Swish<T>::backward(const Tensor<T>& grad_out) {
  return swish_backward(input_, grad_out);
}

// ---------------------------------------------------------------------------
// MaxPool2d

template <typename T>
MaxPool2d<T>::MaxPool2d(std::size_t window, std::size_t stride, std::size_t padding)
    : window_(window), stride_(stride), padding_(padding) {
  if (window < 1 || stride < 1) {
    throw InvalidArgument("MaxPool2d: window and stride must be positive");
  }
}

template <typename T>
Shape MaxPool2d<T>::output_shape(const Shape& input) const {
  if (input.size() != 4 || input[2] + 2 * padding_ < window_ || input[3] + 2 * padding_ < window_) {
    throw InvalidArgument("maxpool2d: cannot pool input " + shape_str(input));
  }
  return {input[0], input[1], (input[2] + 2 * padding_ - window_) / stride_ + 1,
          (input[3] + 2 * padding_ - window_) / stride_ + 1};
}

template <typename T>
Tensor<T> MaxPool2d<T>::forward(Tensor<T> x) {
  MaxPoolResult<T> r = maxpool2d_forward(x, window_, stride_, padding_);
  input_shape_ = x.shape();
  argmax_ = std::move(r.argmax);
  return std::move(r.output);
}

template <typename T>
Tensor<T> MaxPool2d<T>::backward(const Tensor<T>& grad_out) {
  return maxpool2d_backward(grad_out, std::span<const std::size_t>(argmax_), input_shape_);
}

template <typename T>
std::vector<std::int64_t> MaxPool2d<T>::config() const {
  return {static_cast<std::int64_t>(window_), static_cast<std::int64_t>(stride_),
          static_cast<std::int64_t>(padding_)};
}

// ---------------------------------------------------------------------------
// GlobalAvgPool

template <typename T>
Shape GlobalAvgPool<T>::output_shape(const Shape& input) const {
  if (input.size() != 4) {
    throw InvalidArgument("global_avg_pool: expected (N, C, H, W), got " + shape_str(input));
  }
  return {input[0], input[1]};
}

template <typename T>
Tensor<T> GlobalAvgPool<T>::forward(Tensor<T> x) {
  input_shape_ = x.shape();
  return global_avg_pool(x);
}

template <typename T>
Tensor<T> GlobalAvgPool<T>::backward(const Tensor<T>& grad_out) {
  return global_avg_pool_backward(grad_out, input_shape_);
}

// ---------------------------------------------------------------------------
// Linear

template <typename T>
Linear<T>::Linear(std::size_t in_features, std::size_t out_features)
    : weight_({in_features, out_features}),
      bias_({out_features}),
      grad_weight_({in_features, out_features}),
      grad_bias_({out_features}) {}

template <typename T>
Shape Linear<T>::output_shape(const Shape& input) const {
  if (input.size() != 2 || input[1] != weight_.dim(0)) {
    throw InvalidArgument("linear: input " + shape_str(input) + " incompatible with weight " +
                          shape_str(weight_.shape()));
  }
  return {input[0], weight_.dim(1)};
}

template <typename T>
Tensor<T> Linear<T>::forward(Tensor<T> x) {
  input_ = std::move(x);
  return linear_forward(input_, weight_, bias_);
}

template <typename T>
Tensor<T> Linear<T>::backward(const Tensor<T>& grad_out) {
  LinearGrads<T> g = linear_backward(input_, weight_, grad_out);
  grad_weight_ = std::move(g.weight);
  grad_bias_ = std::move(g.bias);
  return std::move(g.input);
}

template <typename T>
std::vector<ParamRef<T>> Linear<T>::parameters() {
  return {{"weight", &weight_, &grad_weight_}, {"bias", &bias_, &grad_bias_}};
}

template <typename T>
std::vector<std::int64_t> Linear<T>::config() const {
  return {static_cast<std::int64_t>(weight_.dim(0)), static_cast<std::int64_t>(weight_.dim(1))};
}

template <typename T>
std::uint64_t Linear<T>::flops(const Shape& input) const {
  const Shape out = output_shape(input);
  return static_cast<std::uint64_t>(input[0]) * (2ULL * weight_.dim(0) - 1ULL) * out[1];
}

// ---------------------------------------------------------------------------
// Acb

template <typename T>
Acb<T>::Acb(AcbBlock<T> block) : block_(std::move(block)) {
  grad_ = block_;
  grad_.conv_square = zero_like(block_.conv_square);
  grad_.conv_hor = zero_like(block_.conv_hor);
  grad_.conv_ver = zero_like(block_.conv_ver);
  grad_.bn_square = zero_like(block_.bn_square);
  grad_.bn_hor = zero_like(block_.bn_hor);
  grad_.bn_ver = zero_like(block_.bn_ver);
}

template <typename T>
Acb<T>::Acb(std::size_t in_ch, std::size_t out_ch, std::size_t stride) : Acb(AcbBlock<T>(in_ch, out_ch, stride)) {}

template <typename T>
Shape Acb<T>::output_shape(const Shape& input) const {
  const Shape a = block_.conv_square.output_shape(input);
  if (block_.conv_hor.output_shape(input) != a || block_.conv_ver.output_shape(input) != a) {
    throw InvalidArgument("acb: branch output shapes differ for input " + shape_str(input));
  }
  return a;
}

template <typename T>
Tensor<T> Acb<T>::forward(Tensor<T> x) {
  input_ = std::move(x);
  // Same operation order as acb_forward(), so both agree bit for bit.
  pre_bn_[0] = conv2d_forward(input_, block_.conv_square);
  Tensor<T> out = batchnorm_forward(pre_bn_[0], block_.bn_square);
  pre_bn_[1] = conv2d_forward(input_, block_.conv_hor);
  const Tensor<T> hor = batchnorm_forward(pre_bn_[1], block_.bn_hor);
  pre_bn_[2] = conv2d_forward(input_, block_.conv_ver);
  const Tensor<T> ver = batchnorm_forward(pre_bn_[2], block_.bn_ver);
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = out[i] + hor[i] + ver[i];
  }
  return out;
}

template <typename T>
Tensor<T> Acb<T>::backward(const Tensor<T>& grad_out) {
  Conv2dLayer<T>* convs[3] = {&block_.conv_square, &block_.conv_hor, &block_.conv_ver};
  BatchNormLayer<T>* bns[3] = {&block_.bn_square, &block_.bn_hor, &block_.bn_ver};
  Conv2dLayer<T>* gconvs[3] = {&grad_.conv_square, &grad_.conv_hor, &grad_.conv_ver};
  BatchNormLayer<T>* gbns[3] = {&grad_.bn_square, &grad_.bn_hor, &grad_.bn_ver};
  Tensor<T> grad_in;
  for (int b = 0; b < 3; ++b) {
    BatchNormGrads<T> gb = batchnorm_backward(pre_bn_[b], *bns[b], grad_out);
    gbns[b]->gamma = std::move(gb.gamma);
    gbns[b]->beta = std::move(gb.beta);
    Conv2dGrads<T> gc = conv2d_backward(input_, *convs[b], gb.input);
    gconvs[b]->weight = std::move(gc.weight);
    gconvs[b]->bias = std::move(gc.bias);
    if (b == 0) {
      grad_in = std::move(gc.input);
    } else {
      for (std::size_t i = 0; i < grad_in.size(); ++i) grad_in[i] += gc.input[i];
    }
  }
  return grad_in;
}

template <typename T>
std::vector<ParamRef<T>> Acb<T>::parameters() {
  std::vector<ParamRef<T>> out;
  push_conv(out, "conv_square.", block_.conv_square, grad_.conv_square);
  push_bn(out, "bn_square.", block_.bn_square, grad_.bn_square);
  push_conv(out, "conv_hor.", block_.conv_hor, grad_.conv_hor);
  push_bn(out, "bn_hor.", block_.bn_hor, grad_.bn_hor);
  push_conv(out, "conv_ver.", block_.conv_ver, grad_.conv_ver);
  push_bn(out, "bn_ver.", block_.bn_ver, grad_.bn_ver);
  return out;
}

template <typename T>
std::vector<Tensor<T>*> Acb<T>::state_tensors() {
  std::vector<Tensor<T>*> out;
  auto add = [&out](Conv2dLayer<T>& c, BatchNormLayer<T>& b) {
    out.insert(out.end(), {&c.weight, &c.bias, &b.gamma, &b.beta, &b.running_mean, &b.running_var});
  };
  add(block_.conv_square, block_.bn_square);
  add(block_.conv_hor, block_.bn_hor);
  add(block_.conv_ver, block_.bn_ver);
  return out;
}

template <typename T>
std::vector<std::int64_t> Acb<T>::config() const {
  const auto& bn = block_.bn_square;
  return {static_cast<std::int64_t>(block_.conv_square.in_channels()),
          static_cast<std::int64_t>(block_.conv_square.out_channels()),
          static_cast<std::int64_t>(block_.conv_square.stride[0]),
          bits_of(bn.epsilon),
          bits_of(bn.momentum),
          mode_flag(bn.mode)};
}

template <typename T>
std::uint64_t Acb<T>::flops(const Shape& input) const {
  const Shape out = output_shape(input);
  const Conv2dLayer<T>& c = block_.conv_square;
  return conv_flops<T>(out, 9 + 3 + 3, c.in_channels(), c.out_channels());
}

// ---------------------------------------------------------------------------
// Factory

template <typename T>
std::unique_ptr<Layer<T>> make_layer(LayerTag tag, const std::vector<std::int64_t>& cfg) {
  switch (tag) {
    case LayerTag::Conv2d: {
      expect_config(cfg, 8, tag);
      return std::make_unique<Conv2d<T>>(as_size(cfg[0], "in_ch"), as_size(cfg[1], "out_ch"),
                                         as_size(cfg[2], "kh"), as_size(cfg[3], "kw"),
                                         std::array<std::size_t, 2>{as_size(cfg[4], "stride"), as_size(cfg[5], "stride")},
                                         std::array<std::size_t, 2>{as_count(cfg[6], "padding"),
                                                                    as_count(cfg[7], "padding")});
    }
    case LayerTag::BatchNorm: {
      expect_config(cfg, 4, tag);
      BatchNormLayer<T> p(as_size(cfg[0], "channels"));
      p.epsilon = double_of(cfg[1]);
      p.momentum = double_of(cfg[2]);
      p.mode = mode_of(cfg[3]);
      return std::make_unique<BatchNorm2d<T>>(std::move(p));
    }
    case LayerTag::Swish:
      expect_config(cfg, 0, tag);
      return std::make_unique<Swish<T>>();
    case LayerTag::MaxPool:
      expect_config(cfg, 3, tag);
      return std::make_unique<MaxPool2d<T>>(as_size(cfg[0], "window"), as_size(cfg[1], "stride"),
                                            as_count(cfg[2], "padding"));
    case LayerTag::GlobalAvgPool:
      expect_config(cfg, 0, tag);
      return std::make_unique<GlobalAvgPool<T>>();
    case LayerTag::Linear:
      expect_config(cfg, 2, tag);
      return std::make_unique<Linear<T>>(as_size(cfg[0], "in_features"), as_size(cfg[1], "out_features"));
    case LayerTag::Acb: {
      expect_config(cfg, 6, tag);
      AcbBlock<T> block(as_size(cfg[0], "in_ch"), as_size(cfg[1], "out_ch"), as_size(cfg[2], "stride"));
      for (BatchNormLayer<T>* bn : {&block.bn_square, &block.bn_hor, &block.bn_ver}) {
        bn->epsilon = double_of(cfg[3]);
        bn->momentum = double_of(cfg[4]);
        bn->mode = mode_of(cfg[5]);
      }
      return std::make_unique<Acb<T>>(std::move(block));
    }
  }
  throw InvalidArgument("make_layer: unknown layer tag " + std::to_string(static_cast<int>(tag)));
}

// ---------------------------------------------------------------------------
// Model

template <typename T>
Model<T>::Model(const Model& other) {
  layers_.reserve(other.layers_.size());
  for (const auto& l : other.layers_) {
    layers_.push_back(l->clone());
  }
}

template <typename T>
Model<T>& Model<T>::operator=(const Model& other) {
  if (this != &other) {
    Model copy(other);
    *this = std::move(copy);
  }
  return *this;
}

template <typename T>
void Model<T>::set_mode(Mode mode) {
  for (auto& l : layers_) l->set_mode(mode);
}

template <typename T>
Shape Model<T>::output_shape(const Shape& input) const {
  Shape s = input;
  for (const auto& l : layers_) s = l->output_shape(s);
  return s;
}

template <typename T>
Tensor<T> Model<T>::forward(Tensor<T> x) {
  Tensor<T> h = x;
  for (auto& l : layers_) h = l->forward(std::move(h));
  return h;
}

template <typename T>
Tensor<T> Model<T>::backward(const Tensor<T>& grad_out) {
  Tensor<T> g = grad_out;
  for (auto it = layers_.rbegin(); it != layers_.rend(); ++it) g = (*it)->backward(g);
  return g;
}

template <typename T>
std::vector<ParamRef<T>> Model<T>::parameters() {
  std::vector<ParamRef<T>> out;
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    for (ParamRef<T>& p : layers_[i]->parameters()) {
      p.name = std::to_string(i) + "." + to_string(layers_[i]->tag()) + "." + p.name;
      out.push_back(std::move(p));
    }
  }
  return out;
}

template <typename T>
std::vector<Tensor<T>*> Model<T>::state_tensors() {
  std::vector<Tensor<T>*> out;
  for (auto& l : layers_) {
    for (Tensor<T>* t : l->state_tensors()) out.push_back(t);
  }
  return out;
}

template <typename T>
std::uint64_t count_flops(const Model<T>& model, const Shape& input_shape) {
  if (input_shape.empty()) {
    throw InvalidArgument("count_flops: input shape is unresolved");
  }
  std::uint64_t total = 0;
  Shape s = input_shape;
  for (std::size_t i = 0; i < model.size(); ++i) {
    total += model.layer(i).flops(s);
    s = model.layer(i).output_shape(s);
  }
  return total;
}

template <typename T>
std::uint64_t count_params(Model<T>& model) {
  std::uint64_t total = 0;
  for (const ParamRef<T>& p : model.parameters()) total += p.value->size();
  return total;
}

template <typename T>
Model<T> fuse_acbs(const Model<T>& model) {
  Model<T> fused;
  for (std::size_t i = 0; i < model.size(); ++i) {
    const Layer<T>& l = model.layer(i);
    if (l.tag() == LayerTag::Acb) {
      fused.add(std::make_unique<Conv2d<T>>(acb_fuse(static_cast<const Acb<T>&>(l).block())));
    } else {
      fused.add(l.clone());
    }
  }
  return fused;
}

template <typename T>
void init_parameters(Model<T>& model, Rng& rng) {
  for (std::size_t i = 0; i < model.size(); ++i) {
    Layer<T>& l = model.layer(i);
    switch (l.tag()) {
      case LayerTag::Conv2d:
        init_conv(static_cast<Conv2d<T>&>(l).params(), rng);
        break;
      case LayerTag::BatchNorm:
        init_bn(static_cast<BatchNorm2d<T>&>(l).params());
        break;
      case LayerTag::Linear: {
        auto& lin = static_cast<Linear<T>&>(l);
        glorot(lin.weight(), lin.weight().dim(0), lin.weight().dim(1), rng);
        lin.bias().fill(T(0));
        break;
      }
      case LayerTag::Acb: {
        AcbBlock<T>& b = static_cast<Acb<T>&>(l).block();
        init_conv(b.conv_square, rng);
        init_bn(b.bn_square);
        init_conv(b.conv_hor, rng);
        init_bn(b.bn_hor);
        init_conv(b.conv_ver, rng);
        init_bn(b.bn_ver);
        break;
      }
      default:
        break;
    }
  }
}

#define JAMFORGE_INSTANTIATE_MODEL(T)                                                   \
  template class Conv2d<T>;                                                             \
  template class BatchNorm2d<T>;                                                        \
  template class Swish<T>;                                                              \
  template class MaxPool2d<T>;                                                          \
  template class GlobalAvgPool<T>;                                                      \
  template class Linear<T>;                                                             \
  template class Acb<T>;                                                                \
  template class Model<T>;                                                              \
  template std::unique_ptr<Layer<T>> make_layer(LayerTag, const std::vector<std::int64_t>&); \
  template std::uint64_t count_flops(const Model<T>&, const Shape&);                    \
  template std::uint64_t count_params(Model<T>&);                                       \
  template Model<T> fuse_acbs(const Model<T>&);                                         \
  template void init_parameters(Model<T>&, Rng&);

JAMFORGE_INSTANTIATE_MODEL(float)
JAMFORGE_INSTANTIATE_MODEL(double)

#undef JAMFORGE_INSTANTIATE_MODEL

}  // namespace jamforge::nn
