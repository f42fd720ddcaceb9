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

#include <cstddef>
#include <vector>

#include "jamforge/signal/types.hpp"

namespace jamforge::tf {

struct CwdConfig {
  double sigma = 1.0;
  int lag_half_length = 64;
  int time_frames = 128;
  int freq_bins = 128;

  void validate() const;
};

/// Real time-frequency map, row-major with one row per retained frame.
struct TimeFrequencyMap {
  std::size_t frames = 0;
  std::size_t bins = 0;
  std::vector<double> values;
  /// Largest |Im| seen in the lag DFT before the imaginary part was dropped.
  double max_imag_residue = 0.0;

  double at(std::size_t frame, std::size_t bin) const { return values[frame * bins + bin]; }
};

/// Sample index of each retained frame: floor((i + 1/2) * N / frames).
std::vector<std::size_t> frame_positions(std::size_t signal_length, int time_frames);

/// Periodic Hamming taper over lags m in (-L, L], indexed by m + L - 1.
/// Symmetric in m, so w(m) = w(-m).
double lag_window(int m, int lag_half_length);

/// Frequency (Hz, in [0, fs/2)) represented by a frequency bin. The lag
/// product x(n+m) x*(n-m) advances at twice the signal frequency, so bins
/// span half the sample rate and content above fs/2 folds onto f - fs/2.
double bin_frequency(int bin, const CwdConfig& cfg, double fs);

/// Bin whose centre is nearest to `freq_hz` after folding.
int nearest_bin(double freq_hz, const CwdConfig& cfg, double fs);

/// Discrete Choi-Williams distribution evaluated at decimated frames.
///
/// For each frame n and lag m the smoothed local autocorrelation is
///   R(n, m) = sum_mu K(mu, m) x(n + mu + m) conj(x(n + mu - m)),
/// where K(mu, m) is the Choi-Williams time-lag kernel
/// sqrt(sigma / (4 pi m^2)) exp(-sigma mu^2 / (4 m^2)), truncated where it
/// drops below 1e-4 of its peak and rescaled to unit sum over mu. The m = 0
/// lag uses the delta limit. R is tapered by the lag window and transformed
/// over m; the real part is returned.
TimeFrequencyMap cwd(const ComplexSignal& x, const CwdConfig& cfg = {});

}  // namespace jamforge::tf
