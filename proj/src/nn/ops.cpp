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

#include "jamforge/nn/ops.hpp"

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <string>

namespace jamforge::nn {
namespace {

template <typename T>
using RowMat = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
template <typename T>
using MapMat = Eigen::Map<RowMat<T>>;
template <typename T>
using ConstMapMat = Eigen::Map<const RowMat<T>>;
template <typename T>
using ColMap = Eigen::Map<Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic>>;
template <typename T>
using ConstColMap = Eigen::Map<const Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic>>;

struct ConvGeometry {
  std::size_t channels, height, width;
  std::size_t kh, kw, sh, sw, ph, pw;
  std::size_t out_h, out_w;

  std::size_t patch() const { return channels * kh * kw; }
  std::size_t pixels() const { return out_h * out_w; }
};

template <typename T>
ConvGeometry geometry(const Shape& input, const Conv2dLayer<T>& layer) {
  const Shape out = layer.output_shape(input);
  return ConvGeometry{input[1],          input[2],          input[3],          layer.kernel_h(),
                      layer.kernel_w(),  layer.stride[0],   layer.stride[1],   layer.padding[0],
                      layer.padding[1],  out[2],            out[3]};
}

// Output columns j whose input column j*sw + v - pw lies inside [0, in_w).
struct ColumnRun {
  std::size_t lo, hi;
};

ColumnRun column_run(const ConvGeometry& g, std::size_t v) {
  const auto in_w = static_cast<std::ptrdiff_t>(g.width);
  const auto off = static_cast<std::ptrdiff_t>(v) - static_cast<std::ptrdiff_t>(g.pw);
  const auto sw = static_cast<std::ptrdiff_t>(g.sw);
  // Smallest j with j*sw + off >= 0 and smallest j with j*sw + off >= in_w.
  const std::ptrdiff_t lo = off >= 0 ? 0 : (-off + sw - 1) / sw;
  const std::ptrdiff_t hi = in_w - off <= 0 ? 0 : (in_w - off + sw - 1) / sw;
  const auto out_w = static_cast<std::ptrdiff_t>(g.out_w);
  const std::ptrdiff_t clamped_hi = std::min(hi, out_w);
  const std::ptrdiff_t clamped_lo = std::min(lo, clamped_hi);
  return {static_cast<std::size_t>(clamped_lo), static_cast<std::size_t>(clamped_hi)};
}

// Column buffer for output rows [i0, i1):
// cols[(c*kh + u)*kw + v][(i - i0)*out_w + j] = x[c, i*sh + u - ph, j*sw + v - pw], zero outside.
template <typename T>
void im2col(const T* x, const ConvGeometry& g, std::size_t i0, std::size_t i1, T* cols) {
  const auto in_h = static_cast<std::ptrdiff_t>(g.height);
  const std::size_t row_len = (i1 - i0) * g.out_w;
  for (std::size_t c = 0; c < g.channels; ++c) {
    const T* plane = x + c * g.height * g.width;
    for (std::size_t u = 0; u < g.kh; ++u) {
      for (std::size_t v = 0; v < g.kw; ++v) {
        T* row = cols + ((c * g.kh + u) * g.kw + v) * row_len;
        const ColumnRun run = column_run(g, v);
        const std::ptrdiff_t shift = static_cast<std::ptrdiff_t>(v) - static_cast<std::ptrdiff_t>(g.pw);
        for (std::size_t i = i0; i < i1; ++i) {
          const auto ih = static_cast<std::ptrdiff_t>(i * g.sh + u) - static_cast<std::ptrdiff_t>(g.ph);
          T* dst = row + (i - i0) * g.out_w;
          if (ih < 0 || ih >= in_h) {
            std::fill(dst, dst + g.out_w, T(0));
            continue;
          }
          const std::ptrdiff_t base = ih * static_cast<std::ptrdiff_t>(g.width) + shift;
          std::fill(dst, dst + run.lo, T(0));
          if (g.sw == 1) {
            std::copy(plane + base + static_cast<std::ptrdiff_t>(run.lo),
                      plane + base + static_cast<std::ptrdiff_t>(run.hi), dst + run.lo);
          } else {
            for (std::size_t j = run.lo; j < run.hi; ++j) dst[j] = plane[base + static_cast<std::ptrdiff_t>(j * g.sw)];
          }
          std::fill(dst + run.hi, dst + g.out_w, T(0));
        }
      }
    }
  }
}

// Adjoint of im2col: scatters column gradients back onto the input plane.
template <typename T>
void col2im(const T* cols, const ConvGeometry& g, std::size_t i0, std::size_t i1, T* x) {
  const auto in_h = static_cast<std::ptrdiff_t>(g.height);
  const std::size_t row_len = (i1 - i0) * g.out_w;
  for (std::size_t c = 0; c < g.channels; ++c) {
    T* plane = x + c * g.height * g.width;
    for (std::size_t u = 0; u < g.kh; ++u) {
      for (std::size_t v = 0; v < g.kw; ++v) {
        const T* row = cols + ((c * g.kh + u) * g.kw + v) * row_len;
        const ColumnRun run = column_run(g, v);
        const std::ptrdiff_t shift = static_cast<std::ptrdiff_t>(v) - static_cast<std::ptrdiff_t>(g.pw);
        for (std::size_t i = i0; i < i1; ++i) {
          const auto ih = static_cast<std::ptrdiff_t>(i * g.sh + u) - static_cast<std::ptrdiff_t>(g.ph);
          if (ih < 0 || ih >= in_h) {
            continue;
          }
          const T* src = row + (i - i0) * g.out_w;
          const std::ptrdiff_t base = ih * static_cast<std::ptrdiff_t>(g.width) + shift;
          for (std::size_t j = run.lo; j < run.hi; ++j) plane[base + static_cast<std::ptrdiff_t>(j * g.sw)] += src[j];
        }
      }
    }
  }
}

// Output rows per column tile, sized so one tile stays cache resident.
constexpr std::size_t kTileElements = 1 << 16;

std::size_t tile_rows(const ConvGeometry& g) {
  return std::clamp<std::size_t>(kTileElements / std::max<std::size_t>(1, g.patch() * g.out_w), 1, g.out_h);
}

void require_same_shape(const Shape& a, const Shape& b, const char* what) {
  if (a != b) {
    throw InvalidArgument(std::string(what) + ": shape mismatch " + shape_str(a) + " vs " + shape_str(b));
  }
}

struct ChannelLayout {
  std::size_t batch, channels, spatial;
};

ChannelLayout channel_layout(const Shape& s, std::size_t channels, const char* what) {
  if (s.size() < 2 || s[1] != channels) {
    throw InvalidArgument(std::string(what) + ": expected (N, " + std::to_string(channels) +
                          ", ...) input, got " + shape_str(s));
  }
  std::size_t spatial = 1;
  for (std::size_t i = 2; i < s.size(); ++i) {
    spatial *= s[i];
  }
  return {s[0], s[1], spatial};
}

}  // namespace

// ---------------------------------------------------------------------------
// Convolution

template <typename T>
Conv2dLayer<T>::Conv2dLayer(std::size_t in_ch, std::size_t out_ch, std::size_t kh, std::size_t kw,
                            std::array<std::size_t, 2> stride_hw, std::array<std::size_t, 2> padding_hw)
    : weight({out_ch, in_ch, kh, kw}), bias({out_ch}), stride(stride_hw), padding(padding_hw) {
  if (stride[0] < 1 || stride[1] < 1) {
    throw InvalidArgument("Conv2dLayer: stride must be at least 1");
  }
}

template <typename T>
Shape Conv2dLayer<T>::output_shape(const Shape& input) const {
  if (weight.rank() != 4 || bias.rank() != 1 || bias.dim(0) != weight.dim(0)) {
    throw InvalidArgument("Conv2dLayer: malformed parameters, weight " + shape_str(weight.shape()) +
                          ", bias " + shape_str(bias.shape()));
  }
  if (input.size() != 4 || input[1] != in_channels()) {
    throw InvalidArgument("conv2d: input " + shape_str(input) + " incompatible with weight " +
                          shape_str(weight.shape()));
  }
  const std::size_t padded_h = input[2] + 2 * padding[0];
  const std::size_t padded_w = input[3] + 2 * padding[1];
  if (padded_h < kernel_h() || padded_w < kernel_w()) {
    throw InvalidArgument("conv2d: input " + shape_str(input) + " smaller than kernel " +
                          shape_str(weight.shape()));
  }
  return {input[0], out_channels(), (padded_h - kernel_h()) / stride[0] + 1,
          (padded_w - kernel_w()) / stride[1] + 1};
}

// With row-major buffers viewed column-major, each sample computes
//   Y (P x K) = C (P x CKK) * W (CKK x K)
// where P = output pixels, K = output channels, CKK = patch length, tiled over
// blocks of output rows.
template <typename T>
Tensor<T> conv2d_forward(const Tensor<T>& x, const Conv2dLayer<T>& layer) {
  const ConvGeometry g = geometry(x.shape(), layer);
  const std::size_t batch = x.dim(0);
  const std::size_t out_ch = layer.out_channels();
  const auto k = static_cast<Eigen::Index>(out_ch);
  const auto patch = static_cast<Eigen::Index>(g.patch());
  const auto pixels = static_cast<Eigen::Index>(g.pixels());
  Tensor<T> out({batch, out_ch, g.out_h, g.out_w});

  const ConstColMap<T> w(layer.weight.data(), patch, k);
  const std::size_t rows = tile_rows(g);
  AlignedVector<T> cols(g.patch() * rows * g.out_w);
  const std::size_t in_plane = g.channels * g.height * g.width;
  for (std::size_t n = 0; n < batch; ++n) {
    ColMap<T> y(out.data() + n * out_ch * g.pixels(), pixels, k);
    for (std::size_t i0 = 0; i0 < g.out_h; i0 += rows) {
      const std::size_t i1 = std::min(i0 + rows, g.out_h);
      const auto np = static_cast<Eigen::Index>((i1 - i0) * g.out_w);
      im2col(x.data() + n * in_plane, g, i0, i1, cols.data());
      y.middleRows(static_cast<Eigen::Index>(i0 * g.out_w), np).noalias() = ConstColMap<T>(cols.data(), np, patch) * w;
    }
    for (Eigen::Index c = 0; c < k; ++c) {
      y.col(c).array() += layer.bias[static_cast<std::size_t>(c)];
    }
  }
  return out;
}

template <typename T>
Conv2dGrads<T> conv2d_backward(const Tensor<T>& x, const Conv2dLayer<T>& layer, const Tensor<T>& grad_out) {
  const ConvGeometry g = geometry(x.shape(), layer);
  require_same_shape(grad_out.shape(), layer.output_shape(x.shape()), "conv2d_backward");
  const std::size_t batch = x.dim(0);
  const std::size_t out_ch = layer.out_channels();
  const auto k = static_cast<Eigen::Index>(out_ch);
  const auto patch = static_cast<Eigen::Index>(g.patch());
  const auto pixels = static_cast<Eigen::Index>(g.pixels());

  Conv2dGrads<T> grads{Tensor<T>(x.shape()), Tensor<T>(layer.weight.shape()), Tensor<T>(layer.bias.shape())};
  const ConstColMap<T> w(layer.weight.data(), patch, k);
  ColMap<T> gw(grads.weight.data(), patch, k);

  const std::size_t rows = tile_rows(g);
  AlignedVector<T> cols(g.patch() * rows * g.out_w);
  AlignedVector<T> grad_cols(cols.size());
  const std::size_t in_plane = g.channels * g.height * g.width;
  for (std::size_t n = 0; n < batch; ++n) {
    const ConstColMap<T> gy(grad_out.data() + n * out_ch * g.pixels(), pixels, k);
    for (Eigen::Index c = 0; c < k; ++c) {
      grads.bias[static_cast<std::size_t>(c)] += gy.col(c).sum();
    }
    for (std::size_t i0 = 0; i0 < g.out_h; i0 += rows) {
      const std::size_t i1 = std::min(i0 + rows, g.out_h);
      const auto np = static_cast<Eigen::Index>((i1 - i0) * g.out_w);
      const auto gy_tile = gy.middleRows(static_cast<Eigen::Index>(i0 * g.out_w), np);
      im2col(x.data() + n * in_plane, g, i0, i1, cols.data());
      gw.noalias() += ConstColMap<T>(cols.data(), np, patch).transpose() * gy_tile;
      ColMap<T>(grad_cols.data(), np, patch).noalias() = gy_tile * w.transpose();
      col2im(grad_cols.data(), g, i0, i1, grads.input.data() + n * in_plane);
    }
  }
  return grads;
}

// ---------------------------------------------------------------------------
// Batch normalization

template <typename T>
BatchNormLayer<T>::BatchNormLayer(std::size_t channels)
    : gamma({channels}, T(1)), beta({channels}, T(0)), running_mean({channels}, T(0)),
      running_var({channels}, T(1)) {}

namespace {

template <typename T>
using ConstVec = Eigen::Map<const Eigen::Array<T, Eigen::Dynamic, 1>>;
template <typename T>
using Vec = Eigen::Map<Eigen::Array<T, Eigen::Dynamic, 1>>;

template <typename T>
ConstVec<T> plane_of(const Tensor<T>& t, const ChannelLayout& lay, std::size_t n, std::size_t c) {
  return ConstVec<T>(t.data() + (n * lay.channels + c) * lay.spatial, static_cast<Eigen::Index>(lay.spatial));
}

template <typename T>
Vec<T> plane_of(Tensor<T>& t, const ChannelLayout& lay, std::size_t n, std::size_t c) {
  return Vec<T>(t.data() + (n * lay.channels + c) * lay.spatial, static_cast<Eigen::Index>(lay.spatial));
}

struct Moments {
  double mean;
  double var;       // biased
  double unbiased;  // sample variance
};

Moments moments_from_sums(double sum, double sum_sq, double count) {
  const double mean = sum / count;
  const double var = std::max(0.0, sum_sq / count - mean * mean);
  return {mean, var, var * count / (count - 1.0)};
}

// Per-channel moments from one pass over each (n, c) plane, accumulated in
// double in n order.
template <typename T>
Moments channel_moments(const Tensor<T>& x, const ChannelLayout& lay, std::size_t c) {
  double sum = 0.0;
  double sum_sq = 0.0;
  for (std::size_t n = 0; n < lay.batch; ++n) {
    const auto p = plane_of(x, lay, n, c).template cast<double>();
    sum += p.sum();
    sum_sq += p.square().sum();
  }
  return moments_from_sums(sum, sum_sq, static_cast<double>(lay.batch * lay.spatial));
}

}  // namespace

template <typename T>
Tensor<T> batchnorm_forward(const Tensor<T>& x, BatchNormLayer<T>& layer) {
  const ChannelLayout lay = channel_layout(x.shape(), layer.channels(), "batchnorm");
  Tensor<T> out(x.shape());
  const std::size_t count = lay.batch * lay.spatial;
  if (layer.mode == Mode::Train && count < 2) {
    throw DegenerateInput("batchnorm: train mode needs more than one value per channel, got input " +
                          shape_str(x.shape()));
  }
  for (std::size_t c = 0; c < lay.channels; ++c) {
    double mean;
    double var;
    if (layer.mode == Mode::Train) {
      const Moments mo = channel_moments(x, lay, c);
      mean = mo.mean;
      var = mo.var;
      layer.running_mean[c] =
          static_cast<T>((1.0 - layer.momentum) * layer.running_mean[c] + layer.momentum * mo.mean);
      layer.running_var[c] =
          static_cast<T>((1.0 - layer.momentum) * layer.running_var[c] + layer.momentum * mo.unbiased);
    } else {
      mean = layer.running_mean[c];
      var = layer.running_var[c];
    }
    const double scale = layer.gamma[c] / std::sqrt(var + layer.epsilon);
    const auto s_t = static_cast<T>(scale);
    const auto b_t = static_cast<T>(layer.beta[c] - mean * scale);
    for (std::size_t n = 0; n < lay.batch; ++n) {
      plane_of(out, lay, n, c) = plane_of(x, lay, n, c) * s_t + b_t;
    }
  }
  return out;
}

template <typename T>
BatchNormGrads<T> batchnorm_backward(const Tensor<T>& x, const BatchNormLayer<T>& layer,
                                     const Tensor<T>& grad_out) {
  const ChannelLayout lay = channel_layout(x.shape(), layer.channels(), "batchnorm_backward");
  require_same_shape(grad_out.shape(), x.shape(), "batchnorm_backward");
  BatchNormGrads<T> grads{Tensor<T>(x.shape()), Tensor<T>(layer.gamma.shape()), Tensor<T>(layer.beta.shape())};
  const std::size_t count = lay.batch * lay.spatial;
  const bool train = layer.mode == Mode::Train;
  if (train && count < 2) {
    throw DegenerateInput("batchnorm_backward: train mode needs more than one value per channel");
  }

  for (std::size_t c = 0; c < lay.channels; ++c) {
    // One pass per plane for sum x, sum x^2, sum g and sum g x.
    double sum_x = 0.0;
    double sum_xx = 0.0;
    double sum_g = 0.0;
    double sum_gx_raw = 0.0;
    for (std::size_t n = 0; n < lay.batch; ++n) {
      const auto xp = plane_of(x, lay, n, c).template cast<double>();
      const auto g = plane_of(grad_out, lay, n, c).template cast<double>();
      if (train) {
        sum_x += xp.sum();
        sum_xx += xp.square().sum();
      }
      sum_g += g.sum();
      sum_gx_raw += (g * xp).sum();
    }
    double mean;
    double var;
    if (train) {
      const Moments mo = moments_from_sums(sum_x, sum_xx, static_cast<double>(count));
      mean = mo.mean;
      var = mo.var;
    } else {
      mean = layer.running_mean[c];
      var = layer.running_var[c];
    }
    const double inv_std = 1.0 / std::sqrt(var + layer.epsilon);
    // sum g * xhat with xhat = (x - mean) * inv_std.
    const double sum_gx = (sum_gx_raw - mean * sum_g) * inv_std;
    grads.beta[c] = static_cast<T>(sum_g);
    grads.gamma[c] = static_cast<T>(sum_gx);

    const double gscale = layer.gamma[c] * inv_std;
    const double m = static_cast<double>(count);
    for (std::size_t n = 0; n < lay.batch; ++n) {
      auto gx = plane_of(grads.input, lay, n, c);
      const auto g = plane_of(grad_out, lay, n, c);
      if (train) {
        // gx = gscale * (g - sum_g/m - xhat * sum_gx/m)
        const auto k0 = static_cast<T>(gscale);
        const auto k1 = static_cast<T>(gscale * sum_g / m);
        const auto k2 = static_cast<T>(gscale * inv_std * sum_gx / m);
        const auto mu = static_cast<T>(mean);
        gx = g * k0 - k1 - (plane_of(x, lay, n, c) - mu) * k2;
      } else {
        gx = g * static_cast<T>(gscale);
      }
    }
  }
  return grads;
}

// ---------------------------------------------------------------------------
// Swish

template <typename T>
Tensor<T> swish(const Tensor<T>& x) {
  Tensor<T> out(x.shape());
  const auto n = static_cast<Eigen::Index>(x.size());
  const ConstVec<T> v(x.data(), n);
  Vec<T>(out.data(), n) = v / (T(1) + (-v).exp());
  return out;
}

template <typename T>
Tensor<T> swish_backward(const Tensor<T>& x, const Tensor<T>& grad_out) {
  require_same_shape(grad_out.shape(), x.shape(), "swish_backward");
  Tensor<T> out(x.shape());
  constexpr std::size_t kBlock = 1024;
  Eigen::Array<T, Eigen::Dynamic, 1> s(kBlock);
  for (std::size_t begin = 0; begin < x.size(); begin += kBlock) {
    const auto len = static_cast<Eigen::Index>(std::min(kBlock, x.size() - begin));
    const ConstVec<T> v(x.data() + begin, len);
    auto sig = s.head(len);
    sig = T(1) / (T(1) + (-v).exp());
    // f'(v) = f + s (1 - f) with f = v s.
    Vec<T>(out.data() + begin, len) = ConstVec<T>(grad_out.data() + begin, len) * (v * sig + sig * (T(1) - v * sig));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Pooling

template <typename T>
MaxPoolResult<T> maxpool2d_forward(const Tensor<T>& x, std::size_t window, std::size_t stride,
                                   std::size_t padding) {
  if (x.rank() != 4) {
    throw InvalidArgument("maxpool2d: expected (N, C, H, W), got " + shape_str(x.shape()));
  }
  if (window < 1 || stride < 1) {
    throw InvalidArgument("maxpool2d: window and stride must be positive");
  }
  const std::size_t h = x.dim(2);
  const std::size_t w = x.dim(3);
  if (h + 2 * padding < window || w + 2 * padding < window) {
    throw InvalidArgument("maxpool2d: input " + shape_str(x.shape()) + " smaller than window");
  }
  const std::size_t oh = (h + 2 * padding - window) / stride + 1;
  const std::size_t ow = (w + 2 * padding - window) / stride + 1;
  const std::size_t planes = x.dim(0) * x.dim(1);

  MaxPoolResult<T> res{Tensor<T>({x.dim(0), x.dim(1), oh, ow}), std::vector<std::size_t>(planes * oh * ow)};
  // Each plane is copied into a zero-bordered buffer so windows need no bounds checks.
  const std::size_t pw = w + 2 * padding;
  const std::size_t ph = h + 2 * padding;
  std::vector<T> padded(ph * pw, T(0));
  for (std::size_t p = 0; p < planes; ++p) {
    const T* src = x.data() + p * h * w;
    for (std::size_t r = 0; r < h; ++r) {
      std::copy(src + r * w, src + (r + 1) * w, padded.data() + (r + padding) * pw + padding);
    }
    for (std::size_t i = 0; i < oh; ++i) {
      for (std::size_t j = 0; j < ow; ++j) {
        std::size_t best_at = i * stride * pw + j * stride;
        T best = padded[best_at];
        for (std::size_t u = 0; u < window; ++u) {
          const std::size_t row = (i * stride + u) * pw + j * stride;
          for (std::size_t v = 0; v < window; ++v) {
            if (padded[row + v] > best) {
              best = padded[row + v];
              best_at = row + v;
            }
          }
        }
        const std::size_t r = best_at / pw;
        const std::size_t c = best_at % pw;
        const bool inside = r >= padding && c >= padding && r < h + padding && c < w + padding;
        const std::size_t o = (p * oh + i) * ow + j;
        res.output[o] = best;
        res.argmax[o] = inside ? p * h * w + (r - padding) * w + (c - padding) : kPaddingCell;
      }
    }
  }
  return res;
}

template <typename T>
Tensor<T> maxpool2d_backward(const Tensor<T>& grad_out, std::span<const std::size_t> argmax,
                             const Shape& input_shape) {
  if (argmax.size() != grad_out.size()) {
    throw InvalidArgument("maxpool2d_backward: argmax does not match gradient size");
  }
  Tensor<T> grad_in(input_shape);
  for (std::size_t o = 0; o < argmax.size(); ++o) {
    if (argmax[o] != kPaddingCell) {
      grad_in[argmax[o]] += grad_out[o];
    }
  }
  return grad_in;
}

template <typename T>
Tensor<T> global_avg_pool(const Tensor<T>& x) {
  if (x.rank() != 4) {
    throw InvalidArgument("global_avg_pool: expected (N, C, H, W), got " + shape_str(x.shape()));
  }
  const std::size_t planes = x.dim(0) * x.dim(1);
  const std::size_t area = x.dim(2) * x.dim(3);
  Tensor<T> out({x.dim(0), x.dim(1)});
  for (std::size_t p = 0; p < planes; ++p) {
    double acc = 0.0;
    const T* src = x.data() + p * area;
    for (std::size_t s = 0; s < area; ++s) acc += src[s];
    out[p] = static_cast<T>(acc / static_cast<double>(area));
  }
  return out;
}

template <typename T>
Tensor<T> global_avg_pool_backward(const Tensor<T>& grad_out, const Shape& input_shape) {
  if (input_shape.size() != 4 || grad_out.shape() != Shape{input_shape[0], input_shape[1]}) {
    throw InvalidArgument("global_avg_pool_backward: gradient " + shape_str(grad_out.shape()) +
                          " does not match input " + shape_str(input_shape));
  }
  Tensor<T> grad_in(input_shape);
  const std::size_t area = input_shape[2] * input_shape[3];
  const T inv = T(1) / static_cast<T>(area);
  for (std::size_t p = 0; p < grad_out.size(); ++p) {
    T* dst = grad_in.data() + p * area;
    std::fill(dst, dst + area, grad_out[p] * inv);
  }
  return grad_in;
}

// ---------------------------------------------------------------------------
// Linear

template <typename T>
Tensor<T> linear_forward(const Tensor<T>& x, const Tensor<T>& w, const Tensor<T>& b) {
  if (x.rank() != 2 || w.rank() != 2 || b.rank() != 1 || x.dim(1) != w.dim(0) || b.dim(0) != w.dim(1)) {
    throw InvalidArgument("linear: incompatible shapes x " + shape_str(x.shape()) + ", w " +
                          shape_str(w.shape()) + ", b " + shape_str(b.shape()));
  }
  const auto n = static_cast<Eigen::Index>(x.dim(0));
  const auto d = static_cast<Eigen::Index>(w.dim(0));
  const auto v = static_cast<Eigen::Index>(w.dim(1));
  Tensor<T> out({x.dim(0), w.dim(1)});
  MapMat<T> y(out.data(), n, v);
  y.noalias() = ConstMapMat<T>(x.data(), n, d) * ConstMapMat<T>(w.data(), d, v);
  for (Eigen::Index r = 0; r < n; ++r) {
    for (Eigen::Index c = 0; c < v; ++c) y(r, c) += b[static_cast<std::size_t>(c)];
  }
  return out;
}

template <typename T>
LinearGrads<T> linear_backward(const Tensor<T>& x, const Tensor<T>& w, const Tensor<T>& grad_out) {
  if (x.rank() != 2 || w.rank() != 2 || x.dim(1) != w.dim(0) ||
      grad_out.shape() != Shape{x.dim(0), w.dim(1)}) {
    throw InvalidArgument("linear_backward: incompatible shapes x " + shape_str(x.shape()) + ", w " +
                          shape_str(w.shape()) + ", grad " + shape_str(grad_out.shape()));
  }
  const auto n = static_cast<Eigen::Index>(x.dim(0));
  const auto d = static_cast<Eigen::Index>(w.dim(0));
  const auto v = static_cast<Eigen::Index>(w.dim(1));
  LinearGrads<T> g{Tensor<T>(x.shape()), Tensor<T>(w.shape()), Tensor<T>({w.dim(1)})};
  const ConstMapMat<T> xm(x.data(), n, d);
  const ConstMapMat<T> wm(w.data(), d, v);
  const ConstMapMat<T> gy(grad_out.data(), n, v);
  MapMat<T>(g.input.data(), n, d).noalias() = gy * wm.transpose();
  MapMat<T>(g.weight.data(), d, v).noalias() = xm.transpose() * gy;
  for (Eigen::Index c = 0; c < v; ++c) {
    g.bias[static_cast<std::size_t>(c)] = gy.col(c).sum();
  }
  return g;
}

// ---------------------------------------------------------------------------
// Loss

template <typename T>
CrossEntropyResult<T> cross_entropy(const Tensor<T>& logits, std::span<const int> labels) {
  if (logits.rank() != 2 || logits.dim(0) != labels.size()) {
    throw InvalidArgument("cross_entropy: logits " + shape_str(logits.shape()) + " vs " +
                          std::to_string(labels.size()) + " labels");
  }
  const std::size_t n = logits.dim(0);
  const std::size_t classes = logits.dim(1);
  CrossEntropyResult<T> res{0.0, Tensor<T>(logits.shape())};
  std::vector<double> probs(classes);
  for (std::size_t i = 0; i < n; ++i) {
    const int label = labels[i];
    if (label < 0 || static_cast<std::size_t>(label) >= classes) {
      throw InvalidArgument("cross_entropy: label " + std::to_string(label) + " outside 0.." +
                            std::to_string(classes - 1));
    }
    const T* z = logits.data() + i * classes;
    const std::size_t top = static_cast<std::size_t>(std::max_element(z, z + classes) - z);
    const double zmax = z[top];
    double rest = 0.0;
    for (std::size_t v = 0; v < classes; ++v) {
      probs[v] = std::exp(static_cast<double>(z[v]) - zmax);
      if (v != top) rest += probs[v];
    }
    // log-sum-exp = zmax + log1p(rest) keeps small losses exact.
    res.loss += zmax + std::log1p(rest) - static_cast<double>(z[static_cast<std::size_t>(label)]);
    const double total = 1.0 + rest;
    T* g = res.grad.data() + i * classes;
    for (std::size_t v = 0; v < classes; ++v) {
      const double p = probs[v] / total;
      g[v] = static_cast<T>((p - (v == static_cast<std::size_t>(label) ? 1.0 : 0.0)) / static_cast<double>(n));
    }
  }
  res.loss /= static_cast<double>(n);
  return res;
}

// ---------------------------------------------------------------------------
// Asymmetric convolution block

template <typename T>
AcbBlock<T>::AcbBlock(std::size_t in_ch, std::size_t out_ch, std::size_t stride)
    : conv_square(in_ch, out_ch, 3, 3, {stride, stride}, {1, 1}),
      bn_square(out_ch),
      conv_hor(in_ch, out_ch, 1, 3, {stride, stride}, {0, 1}),
      bn_hor(out_ch),
      conv_ver(in_ch, out_ch, 3, 1, {stride, stride}, {1, 0}),
      bn_ver(out_ch) {}

template <typename T>
void AcbBlock<T>::set_mode(Mode mode) {
  bn_square.mode = mode;
  bn_hor.mode = mode;
  bn_ver.mode = mode;
}

template <typename T>
Tensor<T> acb_forward(const Tensor<T>& x, AcbBlock<T>& block) {
  Tensor<T> out = batchnorm_forward(conv2d_forward(x, block.conv_square), block.bn_square);
  const Tensor<T> hor = batchnorm_forward(conv2d_forward(x, block.conv_hor), block.bn_hor);
  const Tensor<T> ver = batchnorm_forward(conv2d_forward(x, block.conv_ver), block.bn_ver);
  require_same_shape(out.shape(), hor.shape(), "acb_forward");
  require_same_shape(out.shape(), ver.shape(), "acb_forward");
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = out[i] + hor[i] + ver[i];
  }
  return out;
}

template <typename T>
Conv2dLayer<T> fold_batchnorm(const Conv2dLayer<T>& conv, const BatchNormLayer<T>& bn) {
  const std::size_t out_ch = conv.out_channels();
  if (bn.channels() != out_ch) {
    throw InvalidArgument("fold_batchnorm: channel mismatch");
  }
  Conv2dLayer<T> folded = conv;
  const std::size_t per_out = conv.weight.size() / out_ch;
  for (std::size_t k = 0; k < out_ch; ++k) {
    const double denom = static_cast<double>(bn.running_var[k]) + bn.epsilon;
    if (!(denom > 0.0) || !std::isfinite(denom) || !std::isfinite(static_cast<double>(bn.running_mean[k]))) {
      throw NumericDomainError("fold_batchnorm: running statistics of channel " + std::to_string(k) +
                               " are not usable (var + eps = " + std::to_string(denom) + ")");
    }
    const double scale = bn.gamma[k] / std::sqrt(denom);
    for (std::size_t i = 0; i < per_out; ++i) {
      folded.weight[k * per_out + i] = static_cast<T>(conv.weight[k * per_out + i] * scale);
    }
    folded.bias[k] = static_cast<T>((conv.bias[k] - bn.running_mean[k]) * scale + bn.beta[k]);
  }
  return folded;
}

template <typename T>
Conv2dLayer<T> acb_fuse(const AcbBlock<T>& block) {
  const Conv2dLayer<T> sq = fold_batchnorm(block.conv_square, block.bn_square);
  const Conv2dLayer<T> hor = fold_batchnorm(block.conv_hor, block.bn_hor);
  const Conv2dLayer<T> ver = fold_batchnorm(block.conv_ver, block.bn_ver);

  Conv2dLayer<T> fused = sq;
  const std::size_t out_ch = sq.out_channels();
  const std::size_t in_ch = sq.in_channels();
  for (std::size_t k = 0; k < out_ch; ++k) {
    for (std::size_t c = 0; c < in_ch; ++c) {
      for (std::size_t t = 0; t < 3; ++t) {
        fused.weight.at(k, c, 1, t) += hor.weight.at(k, c, 0, t);
        fused.weight.at(k, c, t, 1) += ver.weight.at(k, c, t, 0);
      }
    }
    fused.bias[k] = sq.bias[k] + hor.bias[k] + ver.bias[k];
  }
  return fused;
}

#define JAMFORGE_INSTANTIATE_OPS(T)                                                                  \
  template struct Conv2dLayer<T>;                                                                    \
  template struct BatchNormLayer<T>;                                                                 \
  template struct AcbBlock<T>;                                                                       \
  template Tensor<T> conv2d_forward(const Tensor<T>&, const Conv2dLayer<T>&);                        \
  template Conv2dGrads<T> conv2d_backward(const Tensor<T>&, const Conv2dLayer<T>&, const Tensor<T>&); \
  template Tensor<T> batchnorm_forward(const Tensor<T>&, BatchNormLayer<T>&);                        \
  template BatchNormGrads<T> batchnorm_backward(const Tensor<T>&, const BatchNormLayer<T>&,          \
                                                const Tensor<T>&);                                   \
  template Tensor<T> swish(const Tensor<T>&);                                                        \
  template Tensor<T> swish_backward(const Tensor<T>&, const Tensor<T>&);                             \
  template MaxPoolResult<T> maxpool2d_forward(const Tensor<T>&, std::size_t, std::size_t, std::size_t); \
  template Tensor<T> maxpool2d_backward(const Tensor<T>&, std::span<const std::size_t>, const Shape&); \
  template Tensor<T> global_avg_pool(const Tensor<T>&);                                              \
  template Tensor<T> global_avg_pool_backward(const Tensor<T>&, const Shape&);                       \
  template Tensor<T> linear_forward(const Tensor<T>&, const Tensor<T>&, const Tensor<T>&);           \
  template LinearGrads<T> linear_backward(const Tensor<T>&, const Tensor<T>&, const Tensor<T>&);     \
  template CrossEntropyResult<T> cross_entropy(const Tensor<T>&, std::span<const int>);              \
  template Tensor<T> acb_forward(const Tensor<T>&, AcbBlock<T>&);                                    \
  template Conv2dLayer<T> fold_batchnorm(const Conv2dLayer<T>&, const BatchNormLayer<T>&);           \
  template Conv2dLayer<T> acb_fuse(const AcbBlock<T>&);

JAMFORGE_INSTANTIATE_OPS(float)
JAMFORGE_INSTANTIATE_OPS(double)

#undef JAMFORGE_INSTANTIATE_OPS

}  // namespace jamforge::nn
