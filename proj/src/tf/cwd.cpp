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

#include "jamforge/tf/cwd.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "jamforge/errors.hpp"
#include "jamforge/signal/fft.hpp"

namespace jamforge::tf {
namespace {

// Kernel samples below this fraction of the per-lag peak are dropped.
constexpr double kKernelFloor = 1e-4;

// Unit-sum smoothing weights over mu for one lag, centred at index `half`.
struct LagKernel {
  int half = 0;
  std::vector<double> weights;
};

LagKernel make_lag_kernel(int m, double sigma) {
  LagKernel k;
  if (m == 0) {
    k.weights = {1.0};
    return k;
  }
  const double scale = sigma / (4.0 * static_cast<double>(m) * static_cast<double>(m));
  const double limit = -std::log(kKernelFloor);
  k.half = static_cast<int>(std::floor(std::sqrt(limit / scale)));
  k.weights.resize(static_cast<std::size_t>(2 * k.half + 1));
  double total = 0.0;
  for (int mu = -k.half; mu <= k.half; ++mu) {
    const double w = std::exp(-scale * mu * mu);
    k.weights[static_cast<std::size_t>(mu + k.half)] = w;
    total += w;
  }
  for (double& w : k.weights) {
    w /= total;
  }
  return k;
}

}  // namespace

void CwdConfig::validate() const {
  if (!(sigma > 0.0) || !std::isfinite(sigma)) {
    throw InvalidArgument("CwdConfig: sigma must be positive and finite");
  }
  if (lag_half_length < 1 || time_frames < 1) {
    throw InvalidArgument("CwdConfig: lag_half_length and time_frames must be positive");
  }
  if (freq_bins != 2 * lag_half_length) {
    throw InvalidArgument("CwdConfig: freq_bins must equal 2 * lag_half_length");
  }
}

std::vector<std::size_t> frame_positions(std::size_t signal_length, int time_frames) {
  std::vector<std::size_t> pos(static_cast<std::size_t>(time_frames));
  const auto frames = static_cast<std::size_t>(time_frames);
  for (std::size_t i = 0; i < frames; ++i) {
    pos[i] = ((2 * i + 1) * signal_length) / (2 * frames);
  }
  return pos;
}

double lag_window(int m, int lag_half_length) {
  return 0.54 + 0.46 * std::cos(std::numbers::pi * m / lag_half_length);
}

double bin_frequency(int bin, const CwdConfig& cfg, double fs) {
  return static_cast<double>(bin) * fs / (2.0 * cfg.freq_bins);
}

int nearest_bin(double freq_hz, const CwdConfig& cfg, double fs) {
  const double half = 0.5 * fs;
  double folded = std::fmod(freq_hz, half);
  if (folded < 0.0) {
    folded += half;
  }
  const auto bin = static_cast<long>(std::lround(folded * 2.0 * cfg.freq_bins / fs));
  return static_cast<int>(bin % cfg.freq_bins);
}

TimeFrequencyMap cwd(const ComplexSignal& x, const CwdConfig& cfg) {
  cfg.validate();
  const int lag_max = cfg.lag_half_length;
  const std::size_t n = x.size();
  if (n < static_cast<std::size_t>(2 * lag_max)) {
    throw InvalidArgument("cwd: signal length " + std::to_string(n) + " is shorter than 2L = " +
                          std::to_string(2 * lag_max));
  }
  if (static_cast<std::size_t>(cfg.time_frames) > n) {
    throw InvalidArgument("cwd: more time frames than samples");
  }

  // Instantaneous lag products p_m(t) = x(t + m) conj(x(t - m)), zero
  // wherever either index leaves the capture.
  const auto lags = static_cast<std::size_t>(lag_max) + 1;
  std::vector<Complex> products(lags * n, Complex(0.0, 0.0));
  for (std::size_t m = 0; m < lags; ++m) {
    Complex* row = products.data() + m * n;
    for (std::size_t t = m; t + m < n; ++t) {
      row[t] = x[t + m] * std::conj(x[t - m]);
    }
  }

  std::vector<LagKernel> kernels;
  kernels.reserve(lags);
  std::vector<double> taper(lags);
  for (int m = 0; m <= lag_max; ++m) {
    kernels.push_back(make_lag_kernel(m, cfg.sigma));
    taper[static_cast<std::size_t>(m)] = lag_window(m, lag_max);
  }

  const std::vector<std::size_t> frames = frame_positions(n, cfg.time_frames);
  const auto bins = static_cast<std::size_t>(cfg.freq_bins);
  TimeFrequencyMap out;
  out.frames = frames.size();
  out.bins = bins;
  out.values.assign(out.frames * bins, 0.0);

  const auto signed_n = static_cast<std::int64_t>(n);
  std::vector<Complex> spectrum(bins);
  for (std::size_t f = 0; f < frames.size(); ++f) {
    const auto centre = static_cast<std::int64_t>(frames[f]);
    for (std::size_t m = 0; m < lags; ++m) {
      const LagKernel& k = kernels[m];
      const Complex* row = products.data() + m * n;
      const std::int64_t lo = std::max<std::int64_t>(-k.half, -centre);
      const std::int64_t hi = std::min<std::int64_t>(k.half, signed_n - 1 - centre);
      Complex acc(0.0, 0.0);
      for (std::int64_t mu = lo; mu <= hi; ++mu) {
        acc += k.weights[static_cast<std::size_t>(mu + k.half)] * row[centre + mu];
      }
      acc *= taper[m];
      if (m == 0) {
        spectrum[0] = Complex(acc.real(), 0.0);
      } else if (m == static_cast<std::size_t>(lag_max)) {
        // m = L and m = -L share a DFT slot; their conjugate pair sums to the real part.
        spectrum[m] = Complex(acc.real(), 0.0);
      } else {
        spectrum[m] = acc;
        spectrum[bins - m] = std::conj(acc);
      }
    }
    fft_inplace(spectrum, FftDirection::Forward);
    double* dst = out.values.data() + f * bins;
    for (std::size_t b = 0; b < bins; ++b) {
      dst[b] = spectrum[b].real();
      out.max_imag_residue = std::max(out.max_imag_residue, std::abs(spectrum[b].imag()));
    }
  }
  return out;
}

}  // namespace jamforge::tf
