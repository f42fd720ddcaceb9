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

#include "jamforge/signal/synthesis.hpp"

#include <array>
#include <cmath>
#include <numbers>
#include <string>

#include "jamforge/errors.hpp"
#include "jamforge/signal/fft.hpp"

namespace jamforge {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// G2 output taps (phase selectors) for PRN 1..32.
constexpr std::array<std::array<int, 2>, 32> kG2PhaseTaps = {{
    {2, 6},  {3, 7},  {4, 8},  {5, 9},  {1, 9},  {2, 10}, {1, 8},  {2, 9},
    {3, 10}, {2, 3},  {3, 4},  {5, 6},  {6, 7},  {7, 8},  {8, 9},  {9, 10},
    {1, 4},  {2, 5},  {3, 6},  {4, 7},  {5, 8},  {6, 9},  {1, 3},  {4, 6},
    {5, 7},  {6, 8},  {7, 9},  {8, 10}, {1, 6},  {2, 7},  {3, 8},  {4, 9},
}};

// Fractional part of cycles, so phases stay accurate for long captures.
double wrapped_phase(double cycles) { return kTwoPi * (cycles - std::floor(cycles)); }

void require_kind(const JammerSpec& spec, JammerKind kind) {
  if (spec.kind != kind) {
    throw InvalidArgument("expected a " + std::string(to_string(kind)) + " spec, got " +
                          std::string(to_string(spec.kind)));
  }
}

void require_capture(std::size_t n, double fs) {
  if (n == 0) {
    throw InvalidArgument("sample count must be at least 1");
  }
  if (!(fs > 0.0) || !std::isfinite(fs)) {
    throw InvalidArgument("sample rate must be positive and finite");
  }
}

std::int64_t floor_index(double v) { return static_cast<std::int64_t>(std::floor(v)); }

}  // namespace

std::vector<std::int8_t> generate_ca_code(int prn) {
  if (prn < 1 || prn > 32) {
    throw InvalidArgument("generate_ca_code: prn must be in 1..32, got " + std::to_string(prn));
  }
  const auto [tap_a, tap_b] = kG2PhaseTaps[static_cast<std::size_t>(prn - 1)];

  // Stage i of a register lives at index i - 1.
  std::array<std::uint8_t, 10> g1;
  std::array<std::uint8_t, 10> g2;
  g1.fill(1);
  g2.fill(1);

  std::vector<std::int8_t> chips(kCaCodeLength);
  for (std::size_t i = 0; i < kCaCodeLength; ++i) {
    const std::uint8_t g2_out = g2[tap_a - 1] ^ g2[tap_b - 1];
    const std::uint8_t bit = g1[9] ^ g2_out;
    chips[i] = bit ? std::int8_t{-1} : std::int8_t{1};

    const std::uint8_t g1_fb = g1[2] ^ g1[9];
    const std::uint8_t g2_fb = g2[1] ^ g2[2] ^ g2[5] ^ g2[7] ^ g2[8] ^ g2[9];
    for (int s = 9; s > 0; --s) {
      g1[s] = g1[s - 1];
      g2[s] = g2[s - 1];
    }
    g1[0] = g1_fb;
    g2[0] = g2_fb;
  }
  return chips;
}

ComplexSignal generate_gnss_signal(const GnssParams& params, std::size_t n, double fs, Rng& rng) {
  params.validate();
  require_capture(n, fs);
  const std::vector<std::int8_t> code = generate_ca_code(params.prn);

  const double t_first = -params.delay_tau0_s;
  const double t_last = static_cast<double>(n - 1) / fs - params.delay_tau0_s;
  const std::int64_t first_bit = floor_index(t_first * params.data_rate_hz);
  const std::int64_t last_bit = floor_index(t_last * params.data_rate_hz);
  std::vector<double> bits(static_cast<std::size_t>(last_bit - first_bit + 1));
  for (double& b : bits) {
    b = (rng.next_u64() >> 63) ? -1.0 : 1.0;
  }

  const double amplitude = std::sqrt(2.0 * params.power_c);
  const auto code_len = static_cast<std::int64_t>(kCaCodeLength);
  std::vector<Complex> out(n);
  for (std::size_t m = 0; m < n; ++m) {
    const double t = static_cast<double>(m) / fs;
    const double td = t - params.delay_tau0_s;
    std::int64_t chip = floor_index(td * params.code_rate_hz) % code_len;
    if (chip < 0) {
      chip += code_len;
    }
    const std::int64_t bit = floor_index(td * params.data_rate_hz) - first_bit;
    const double mod = bits[static_cast<std::size_t>(bit)] * code[static_cast<std::size_t>(chip)];
    const double phase = wrapped_phase(params.doppler_f0_hz * t) + params.phase_phi0_rad;
    out[m] = amplitude * mod * std::polar(1.0, phase);
  }
  return ComplexSignal(std::move(out), fs);
}

namespace detail {

ComplexSignal tone_sum(const std::vector<Tone>& tones, std::size_t n, double fs) {
  require_capture(n, fs);
  if (tones.empty()) {
    throw InvalidArgument("tone_sum: at least one tone required");
  }
  double total_power = 0.0;
  for (const Tone& t : tones) {
    if (!(t.power > 0.0)) {
      throw InvalidArgument("tone powers must be positive");
    }
    total_power += t.power;
  }
  const double inv_a = 1.0 / std::sqrt(total_power);

  std::vector<Complex> out(n, Complex(0.0, 0.0));
  for (const Tone& t : tones) {
    const double amp = std::sqrt(t.power);
    const double step = t.freq_hz / fs;
    for (std::size_t m = 0; m < n; ++m) {
      out[m] += amp * std::polar(1.0, wrapped_phase(step * static_cast<double>(m)) + t.phase_rad);
    }
  }
  for (Complex& v : out) {
    v *= inv_a;
  }
  return ComplexSignal(std::move(out), fs);
}

}  // namespace detail

ComplexSignal gen_stj(const JammerSpec& spec, std::size_t n, double fs) {
  require_kind(spec, JammerKind::Stj);
  return detail::tone_sum({Tone{1.0, spec.fc_hz, spec.phase_rad}}, n, fs);
}

ComplexSignal gen_mtj(const JammerSpec& spec, std::size_t n, double fs) {
  require_kind(spec, JammerKind::Mtj);
  spec.validate();
  return detail::tone_sum(spec.tones, n, fs);
}

ComplexSignal gen_pbnj(const JammerSpec& spec, std::size_t n, double fs, Rng& rng) {
  require_kind(spec, JammerKind::Pbnj);
  require_capture(n, fs);
  spec.validate();
  const double bw = *spec.bandwidth_hz;
  if (bw > fs) {
    throw InvalidArgument("PBNJ bandwidth exceeds the sample rate");
  }

  std::vector<Complex> noise(n);
  for (Complex& v : noise) {
    const double re = rng.normal();
    const double im = rng.normal();
    v = Complex(re, im);
  }

  // Brick-wall mask about DC, then shift to fc.
  fft_inplace(noise, FftDirection::Forward);
  const auto nn = static_cast<std::int64_t>(n);
  for (std::int64_t k = 0; k < nn; ++k) {
    const std::int64_t signed_bin = (2 * k < nn) ? k : k - nn;
    const double freq = static_cast<double>(signed_bin) * fs / static_cast<double>(n);
    if (std::abs(freq) > 0.5 * bw) {
      noise[static_cast<std::size_t>(k)] = Complex(0.0, 0.0);
    }
  }
  fft_inplace(noise, FftDirection::Inverse);

  const double step = spec.fc_hz / fs;
  double energy = 0.0;
  for (std::size_t m = 0; m < n; ++m) {
    noise[m] *= std::polar(1.0, wrapped_phase(step * static_cast<double>(m)) + spec.phase_rad);
    energy += std::norm(noise[m]);
  }
  if (!(energy > 0.0)) {
    throw DegenerateInput("PBNJ: band-limited noise has zero energy");
  }
  const double a = std::sqrt(static_cast<double>(n) / energy);
  for (Complex& v : noise) {
    v *= a;
  }
  return ComplexSignal(std::move(noise), fs);
}

ComplexSignal gen_lfmj(const JammerSpec& spec, std::size_t n, double fs) {
  require_kind(spec, JammerKind::Lfmj);
  require_capture(n, fs);
  if (!spec.bandwidth_hz || !(*spec.bandwidth_hz > 0.0)) {
    throw InvalidArgument("LFMJ bandwidth must be positive");
  }
  if (!spec.sweep_period_s || !(*spec.sweep_period_s > 0.0)) {
    throw InvalidArgument("LFMJ sweep period must be positive");
  }
  const double period = *spec.sweep_period_s;
  const double rate = *spec.bandwidth_hz / period;

  std::vector<Complex> out(n);
  for (std::size_t m = 0; m < n; ++m) {
    const double t = std::fmod(static_cast<double>(m) / fs, period);
    const double cycles = spec.fc_hz * t + 0.5 * rate * t * t;
    out[m] = std::polar(1.0, wrapped_phase(cycles) + spec.phase_rad);
  }
  return ComplexSignal(std::move(out), fs);
}

ComplexSignal gen_ppnj(const JammerSpec& spec, std::size_t n, double fs) {
  require_kind(spec, JammerKind::Ppnj);
  require_capture(n, fs);
  spec.validate();
  const double period = *spec.pulse_period_s;
  const double width = *spec.pulse_width_s;
  const double level = std::sqrt(period / width);

  // Work in sample units; the pulse occupies the half-open window
  // [start, start + width) centred in each period.
  const double period_samples = period * fs;
  const double start = 0.5 * (period - width) * fs;
  const double stop = start + width * fs;
  const double slack = 1e-9 * period_samples;
  const bool full_duty = width >= period;

  std::vector<Complex> out(n, Complex(0.0, 0.0));
  for (std::size_t m = 0; m < n; ++m) {
    const double pos = std::fmod(static_cast<double>(m), period_samples);
    if (full_duty || (pos >= start - slack && pos < stop - slack)) {
      out[m] = Complex(level, 0.0);
    }
  }
  return ComplexSignal(std::move(out), fs);
}

ComplexSignal generate_jammer(const JammerSpec& spec, std::size_t n, double fs, Rng& rng) {
  switch (spec.kind) {
    case JammerKind::Stj: return gen_stj(spec, n, fs);
    case JammerKind::Mtj: return gen_mtj(spec, n, fs);
    case JammerKind::Pbnj: return gen_pbnj(spec, n, fs, rng);
    case JammerKind::Lfmj: return gen_lfmj(spec, n, fs);
    case JammerKind::Ppnj: return gen_ppnj(spec, n, fs);
  }
  throw InvalidArgument("unknown jammer kind");
}

CompoundScales compound_scales(double pr_db) {
  if (!std::isfinite(pr_db)) {
    throw InvalidArgument("compound power ratio must be finite");
  }
  const double ratio = std::pow(10.0, pr_db / 10.0);
  return {std::sqrt(1.0 / (1.0 + ratio)), std::sqrt(ratio / (1.0 + ratio))};
}

ComplexSignal compose_compound(const ComplexSignal& a, const ComplexSignal& b, double pr_db) {
  if (a.size() != b.size()) {
    throw InvalidArgument("compose_compound: length mismatch (" + std::to_string(a.size()) + " vs " +
                          std::to_string(b.size()) + ")");
  }
  if (a.sample_rate_hz() != b.sample_rate_hz()) {
    throw InvalidArgument("compose_compound: sample rate mismatch");
  }
  const auto [alpha, beta] = compound_scales(pr_db);
  std::vector<Complex> out(a.size());
  for (std::size_t m = 0; m < out.size(); ++m) {
    out[m] = alpha * a[m] + beta * b[m];
  }
  return ComplexSignal(std::move(out), a.sample_rate_hz());
}

double average_power(const ComplexSignal& x) {
  double acc = 0.0;
  for (const Complex& v : x.samples()) {
    acc += std::norm(v);
  }
  return acc / static_cast<double>(x.size());
}

ComplexSignal unit_normalize(const ComplexSignal& x) {
  double energy = 0.0;
  for (const Complex& v : x.samples()) {
    energy += std::norm(v);
  }
  if (!(energy > 0.0)) {
    throw DegenerateInput("unit_normalize: input has zero energy");
  }
  const double inv = 1.0 / std::sqrt(energy);
  std::vector<Complex> out(x.samples());
  for (Complex& v : out) {
    v *= inv;
  }
  return ComplexSignal(std::move(out), x.sample_rate_hz());
}

ComplexSignal power_normalize(const ComplexSignal& x) {
  const double p = average_power(x);
  if (!(p > 0.0)) {
    throw DegenerateInput("power_normalize: input has zero power");
  }
  const double inv = 1.0 / std::sqrt(p);
  std::vector<Complex> out(x.samples());
  for (Complex& v : out) {
    v *= inv;
  }
  return ComplexSignal(std::move(out), x.sample_rate_hz());
}

double noise_power(const GnssParams& gnss, double fs) {
  return gnss.power_c * fs / std::pow(10.0, gnss.cn0_dbhz / 10.0);
}

ReceivedCapture synthesize_capture(const GnssParams& gnss, const CompoundSpec& jam, double jnr_db,
                                   std::size_t n, double fs, Rng& rng) {
  require_capture(n, fs);
  jam.validate();
  if (!std::isfinite(jnr_db)) {
    throw InvalidArgument("jnr_db must be finite");
  }

  ComplexSignal s = generate_gnss_signal(gnss, n, fs, rng);
  const ComplexSignal a = power_normalize(generate_jammer(jam.first, n, fs, rng));
  const ComplexSignal b = power_normalize(generate_jammer(jam.second, n, fs, rng));
  ComplexSignal j = compose_compound(a, b, jam.pr_db);

  const double p_noise = noise_power(gnss, fs);
  const double p_target = p_noise * std::pow(10.0, jnr_db / 10.0);
  const double p_measured = average_power(j);
  if (!(p_measured > 0.0)) {
    throw DegenerateInput("compound jamming has zero power");
  }
  const double gain = std::sqrt(p_target / p_measured);
  for (Complex& v : j.samples()) {
    v *= gain;
  }

  const double sd = std::sqrt(0.5 * p_noise);
  std::vector<Complex> noise(n);
  for (Complex& v : noise) {
    const double re = rng.normal();
    const double im = rng.normal();
    v = Complex(sd * re, sd * im);
  }
  ComplexSignal nsig(std::move(noise), fs);

  std::vector<Complex> r(n);
  for (std::size_t m = 0; m < n; ++m) {
    r[m] = s[m] + j[m] + nsig[m];
  }
  return ReceivedCapture{std::move(s), std::move(j), std::move(nsig), ComplexSignal(std::move(r), fs),
                         p_noise};
}

ComplexSignal synthesize_received(const GnssParams& gnss, const CompoundSpec& jam, double jnr_db,
                                  std::size_t n, double fs, Rng& rng) {
  return synthesize_capture(gnss, jam, jnr_db, n, fs, rng).received;
}

}  // namespace jamforge
