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

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <set>

#include "jamforge/errors.hpp"
#include "jamforge/signal/fft.hpp"
#include "jamforge/signal/synthesis.hpp"
#include "support/oracles.hpp"

namespace jamforge {
namespace {

constexpr double kFs = 15.36e6;
constexpr std::size_t kN = 1024;

std::vector<double> periodogram(const ComplexSignal& x) {
  std::vector<Complex> buf = x.samples();
  fft_inplace(buf, FftDirection::Forward);
  std::vector<double> p(buf.size());
  for (std::size_t k = 0; k < buf.size(); ++k) p[k] = std::norm(buf[k]);
  return p;
}

TEST(CaCode, MatchesShiftRegisterOracleForEveryPrn) {
  for (int prn = 1; prn <= 32; ++prn) {
    const auto code = generate_ca_code(prn);
    ASSERT_EQ(code.size(), kCaCodeLength);
    EXPECT_EQ(code, oracle::ca_code_chips(prn)) << "prn " << prn;
    EXPECT_EQ(oracle::first_chips_octal(code), oracle::kFirstChipsOctal[static_cast<std::size_t>(prn - 1)])
        << "prn " << prn;
  }
}

TEST(CaCode, Prn1FirstChips) {
  const auto code = generate_ca_code(1);
  const std::vector<std::int8_t> expected = {-1, -1, 1, 1, -1, 1, 1, 1, 1, 1};  // 1100100000
  EXPECT_EQ(std::vector<std::int8_t>(code.begin(), code.begin() + 10), expected);
}

TEST(CaCode, ZeroLagAutocorrelationIsLength) {
  const auto code = generate_ca_code(1);
  long acc = 0;
  for (auto c : code) acc += c * c;
  EXPECT_EQ(acc, 1023);
}

TEST(CaCode, RejectsPrnOutOfRange) {
  EXPECT_THROW(generate_ca_code(0), InvalidArgument);
  EXPECT_THROW(generate_ca_code(33), InvalidArgument);
}

TEST(Fft, AgreesWithNaiveDft) {
  Rng rng(3);
  std::vector<Complex> x(60);
  for (auto& v : x) v = {rng.normal(), rng.normal()};
  const auto ref = oracle::naive_dft(x);
  std::vector<Complex> y = x;
  fft_inplace(y, FftDirection::Forward);
  for (std::size_t k = 0; k < x.size(); ++k) EXPECT_LT(std::abs(y[k] - ref[k]), 1e-9);
  fft_inplace(y, FftDirection::Inverse);
  for (std::size_t k = 0; k < x.size(); ++k) EXPECT_LT(std::abs(y[k] / 60.0 - x[k]), 1e-12);
}

TEST(Rng, SameSeedSameStream) {
  Rng a(42), b(42), c(43);
  bool differs = false;
  for (int i = 0; i < 100; ++i) {
    const auto va = a.next_u64();
    EXPECT_EQ(va, b.next_u64());
    differs |= va != c.next_u64();
  }
  EXPECT_TRUE(differs);
}

TEST(Rng, UniformIntCoversClosedRange) {
  Rng rng(5);
  std::set<std::int64_t> seen;
  for (int i = 0; i < 2000; ++i) {
    const auto v = rng.uniform_int(2, 5);
    ASSERT_GE(v, 2);
    ASSERT_LE(v, 5);
    seen.insert(v);
  }
  EXPECT_EQ(seen.size(), 4u);
}

TEST(Rng, DeriveSeedDependsOnPath) {
  EXPECT_EQ(derive_seed(1, {2, 3}), derive_seed(1, {2, 3}));
  EXPECT_NE(derive_seed(1, {2, 3}), derive_seed(1, {3, 2}));
  EXPECT_NE(derive_seed(1, {2, 3}), derive_seed(2, {2, 3}));
}

TEST(Gnss, IdentityModulationIsConstantSqrt2) {
  GnssParams p;
  p.doppler_f0_hz = 0.0;
  p.phase_phi0_rad = 0.0;
  // Chips and bits are +-1, so with no carrier rotation every sample is +-sqrt(2C).
  Rng rng(1);
  const ComplexSignal s = generate_gnss_signal(p, 64, kFs, rng);
  for (const Complex& v : s.samples()) {
    EXPECT_NEAR(std::abs(v.real()), std::sqrt(2.0), 1e-12);
    EXPECT_EQ(v.imag(), 0.0);
  }
}

TEST(Gnss, DefaultAveragePowerIsTwoC) {
  Rng rng(9);
  const ComplexSignal s = generate_gnss_signal(GnssParams{}, kN, kFs, rng);
  EXPECT_NEAR(average_power(s), 2.0, 1e-6);
}

TEST(Gnss, Deterministic) {
  Rng a(11), b(11);
  EXPECT_EQ(generate_gnss_signal(GnssParams{}, kN, kFs, a).samples(),
            generate_gnss_signal(GnssParams{}, kN, kFs, b).samples());
}

TEST(Stj, ZeroFrequencyIsOnes) {
  const ComplexSignal s = gen_stj(JammerSpec::stj(0.0, 0.0), 32, kFs);
  for (const Complex& v : s.samples()) EXPECT_EQ(v, Complex(1.0, 0.0));
}

TEST(Stj, QuarterRatePeaksAtBin256) {
  const auto p = periodogram(gen_stj(JammerSpec::stj(kFs / 4, 0.3), kN, kFs));
  EXPECT_EQ(std::max_element(p.begin(), p.end()) - p.begin(), 256);
}

TEST(Stj, UnitModulus) {
  const ComplexSignal s = gen_stj(JammerSpec::stj(1.234e6, 2.0), kN, kFs);
  for (const Complex& v : s.samples()) EXPECT_NEAR(std::abs(v), 1.0, 1e-12);
  EXPECT_THROW(gen_stj(JammerSpec::pbnj(0.0, 0.0, 1e6), kN, kFs), InvalidArgument);
}

TEST(Mtj, FirstSampleOfTwoTones) {
  const ComplexSignal s = gen_mtj(JammerSpec::mtj({{1.0, kFs / 8, 0.0}, {1.0, kFs / 4, 0.0}}), kN, kFs);
  EXPECT_NEAR(s[0].real(), std::sqrt(2.0), 1e-12);
  EXPECT_NEAR(s[0].imag(), 0.0, 1e-12);
}

TEST(Mtj, ThreeBinAlignedTonesHaveUnitPower) {
  const double df = kFs / kN;
  const ComplexSignal s =
      gen_mtj(JammerSpec::mtj({{1.0, 10 * df, 0.1}, {1.0, 200 * df, 1.0}, {1.0, 500 * df, 2.0}}), kN, kFs);
  EXPECT_NEAR(average_power(s), 1.0, 1e-6);
}

TEST(Mtj, TwoTonesGiveTwoPeaks) {
  const double df = kFs / kN;
  const auto p = periodogram(gen_mtj(JammerSpec::mtj({{1.0, 64 * df, 0.0}, {1.0, 300 * df, 0.5}}), kN, kFs));
  const double peak = *std::max_element(p.begin(), p.end());
  int above = 0;
  for (double v : p) above += v > peak * 0.01 ? 1 : 0;
  EXPECT_EQ(above, 2);
}

TEST(Mtj, RejectsDuplicateFrequencies) {
  EXPECT_THROW(gen_mtj(JammerSpec::mtj({{1.0, 1e6, 0.0}, {1.0, 1e6, 1.0}}), kN, kFs), InvalidArgument);
}

TEST(Mtj, SingleToneReproducesStj) {
  const ComplexSignal a = detail::tone_sum({{1.0, 2.5e6, 0.7}}, kN, kFs);
  const ComplexSignal b = gen_stj(JammerSpec::stj(2.5e6, 0.7), kN, kFs);
  EXPECT_EQ(a.samples(), b.samples());
}

TEST(Pbnj, ExactUnitPowerAndDeterminism) {
  Rng a(4), b(4);
  const JammerSpec spec = JammerSpec::pbnj(3.84e6, 0.0, 1.536e6);
  const ComplexSignal x = gen_pbnj(spec, kN, kFs, a);
  EXPECT_NEAR(average_power(x), 1.0, 1e-9);
  EXPECT_EQ(x.samples(), gen_pbnj(spec, kN, kFs, b).samples());
}

TEST(Pbnj, EnergyStaysInBand) {
  Rng rng(8);
  const double fc = 3.84e6, bw = 1.536e6;
  const auto p = periodogram(gen_pbnj(JammerSpec::pbnj(fc, 0.0, bw), kN, kFs, rng));
  double in = 0.0, total = 0.0;
  for (std::size_t k = 0; k < kN; ++k) {
    double f = static_cast<double>(k) * kFs / kN;
    if (f >= kFs / 2) f -= kFs;
    total += p[k];
    if (f >= fc - bw / 2 && f <= fc + bw / 2) in += p[k];
  }
  EXPECT_GE(in / total, 0.95);
}

TEST(Pbnj, RejectsBandwidthAboveSampleRate) {
  Rng rng(1);
  EXPECT_THROW(gen_pbnj(JammerSpec::pbnj(0.0, 0.0, 2 * kFs), kN, kFs, rng), InvalidArgument);
}

double unwrapped_phase_diff(const ComplexSignal& s, std::size_t m) { return std::arg(s[m + 1] * std::conj(s[m])); }

TEST(Lfmj, InstantaneousFrequencyEndpoints) {
  const double fc = 1e6, bw = 7.68e6, period = kN / kFs;
  const ComplexSignal s = gen_lfmj(JammerSpec::lfmj(fc, 0.0, bw, period), kN, kFs);
  const double q = bw / period;
  // Finite difference at step m measures the frequency at t = (m + 1/2) / fs.
  const double f0 = unwrapped_phase_diff(s, 0) * kFs / (2 * std::numbers::pi);
  EXPECT_NEAR(f0, fc + q * 0.5 / kFs, 1.0);
  const double f_end = unwrapped_phase_diff(s, kN - 2) * kFs / (2 * std::numbers::pi);
  // fc + B = 8.68 MHz aliases to 8.68 - 15.36 MHz.
  const double expected = fc + q * (kN - 1.5) / kFs - kFs;
  EXPECT_NEAR(f_end, expected, 1.0);
}

TEST(Lfmj, PhaseSlopeIsLinear) {
  const double bw = 7.68e6, period = kN / kFs;
  const ComplexSignal s = gen_lfmj(JammerSpec::lfmj(0.0, 0.0, bw, period), kN, kFs);
  // Least-squares slope of the per-step phase increment against time.
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  double prev = 0.0, unwrapped = 0.0;
  const std::size_t n = kN - 1;
  for (std::size_t m = 0; m < n; ++m) {
    double d = unwrapped_phase_diff(s, m);
    if (m > 0) {
      while (d - prev > std::numbers::pi) d -= 2 * std::numbers::pi;
      while (d - prev < -std::numbers::pi) d += 2 * std::numbers::pi;
    }
    prev = d;
    unwrapped = d;
    const double t = static_cast<double>(m) / kFs;
    sx += t;
    sy += unwrapped;
    sxx += t * t;
    sxy += t * unwrapped;
  }
  const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);  // rad per sample per second
  const double q = bw / period;
  EXPECT_NEAR(slope, 2 * std::numbers::pi * q / kFs, 0.01 * 2 * std::numbers::pi * q / kFs);
}

TEST(Lfmj, UnitModulusAndRejectsBadParams) {
  const ComplexSignal s = gen_lfmj(JammerSpec::lfmj(2e6, 1.0, 3e6, 2e-5), kN, kFs);
  for (const Complex& v : s.samples()) EXPECT_NEAR(std::abs(v), 1.0, 1e-12);
  EXPECT_THROW(gen_lfmj(JammerSpec::lfmj(0.0, 0.0, 3e6, 0.0), kN, kFs), InvalidArgument);
  EXPECT_THROW(gen_lfmj(JammerSpec::lfmj(0.0, 0.0, -1.0, 1e-5), kN, kFs), InvalidArgument);
}

TEST(Ppnj, FullDutyIsConstantOne) {
  const double period = 128 / kFs;
  const ComplexSignal s = gen_ppnj(JammerSpec::ppnj(period, period), kN, kFs);
  for (const Complex& v : s.samples()) EXPECT_EQ(v, Complex(1.0, 0.0));
}

TEST(Ppnj, HalfDutyLevelIsSqrt2) {
  const double period = 128 / kFs;
  const ComplexSignal s = gen_ppnj(JammerSpec::ppnj(period, period / 2), kN, kFs);
  std::size_t on = 0;
  for (const Complex& v : s.samples()) {
    if (v != Complex(0.0, 0.0)) {
      EXPECT_DOUBLE_EQ(v.real(), std::sqrt(2.0));
      ++on;
    }
  }
  EXPECT_EQ(on, kN / 2);
}

TEST(Ppnj, PeriodAveragePowerIsOne) {
  for (std::size_t per : {128u, 200u, 341u}) {
    for (double duty : {0.1, 0.25, 0.5}) {
      const double period = static_cast<double>(per) / kFs;
      const ComplexSignal s = gen_ppnj(JammerSpec::ppnj(period, duty * period), per, kFs);
      EXPECT_NEAR(average_power(s), 1.0, 1.0 / static_cast<double>(per) * std::sqrt(1.0 / duty) * 2);
    }
  }
  EXPECT_THROW(gen_ppnj(JammerSpec::ppnj(1e-5, 2e-5), kN, kFs), InvalidArgument);
}

TEST(Compound, ScalesAndRatio) {
  const CompoundScales s0 = compound_scales(0.0);
  EXPECT_NEAR(s0.alpha, 1 / std::sqrt(2.0), 1e-15);
  EXPECT_NEAR(s0.beta, 1 / std::sqrt(2.0), 1e-15);
  const CompoundScales s10 = compound_scales(10.0);
  EXPECT_NEAR(s10.beta * s10.beta / (s10.alpha * s10.alpha), 10.0, 1e-12);
  EXPECT_NEAR(s10.alpha * s10.alpha + s10.beta * s10.beta, 1.0, 1e-15);
}

TEST(Compound, VeryNegativeRatioReturnsFirst) {
  const ComplexSignal a = gen_stj(JammerSpec::stj(1e6, 0.0), kN, kFs);
  const ComplexSignal b = gen_stj(JammerSpec::stj(3e6, 0.0), kN, kFs);
  const ComplexSignal c = compose_compound(a, b, -300.0);
  for (std::size_t m = 0; m < kN; ++m) EXPECT_LT(std::abs(c[m] - a[m]), 1e-6);
  EXPECT_THROW(compose_compound(a, gen_stj(JammerSpec::stj(0, 0), 10, kFs), 0.0), InvalidArgument);
}

TEST(AveragePower, Examples) {
  EXPECT_DOUBLE_EQ(average_power(ComplexSignal({1, 1, 1, 1}, 1.0)), 1.0);
  EXPECT_DOUBLE_EQ(average_power(ComplexSignal({{1, 0}, {0, 1}, {-1, 0}, {0, -1}}, 1.0)), 1.0);
  EXPECT_DOUBLE_EQ(average_power(ComplexSignal({{3, 4}}, 1.0)), 25.0);
  EXPECT_THROW(ComplexSignal({}, 1.0), InvalidArgument);
}

TEST(UnitNormalize, Examples) {
  const ComplexSignal y = unit_normalize(ComplexSignal({2, 0}, 1.0));
  EXPECT_EQ(y[0], Complex(1, 0));
  EXPECT_EQ(y[1], Complex(0, 0));
  Rng rng(2);
  std::vector<Complex> v(50);
  for (auto& c : v) c = {rng.normal(), rng.normal()};
  const ComplexSignal u = unit_normalize(ComplexSignal(v, 1.0));
  double e = 0.0;
  for (const auto& c : u.samples()) e += std::norm(c);
  EXPECT_NEAR(e, 1.0, 1e-12);
  const ComplexSignal again = unit_normalize(u);
  for (std::size_t i = 0; i < v.size(); ++i) EXPECT_LT(std::abs(again[i] - u[i]), 1e-12);
  EXPECT_THROW(unit_normalize(ComplexSignal({0, 0}, 1.0)), DegenerateInput);
}

CompoundSpec sample_compound() {
  CompoundSpec c;
  c.first = JammerSpec::stj(2e6, 0.0);
  c.second = JammerSpec::pbnj(5e6, 0.0, 3e6);
  c.class_id = 0;
  return c;
}

TEST(Received, NoisePowerFromCn0) { EXPECT_NEAR(noise_power(GnssParams{}, kFs), 1536.0, 1e-9); }

TEST(Received, JnrIsRealized) {
  for (double jnr : {0.0, 10.0}) {
    Rng rng(21);
    const ReceivedCapture cap = synthesize_capture(GnssParams{}, sample_compound(), jnr, kN, kFs, rng);
    EXPECT_NEAR(average_power(cap.jamming) / cap.target_noise_power, std::pow(10.0, jnr / 10), 0.01 * std::pow(10.0, jnr / 10));
  }
}

TEST(Received, DeterministicPerSeed) {
  Rng a(5), b(5), c(6);
  const auto ra = synthesize_received(GnssParams{}, sample_compound(), 0.0, kN, kFs, a);
  EXPECT_EQ(ra.samples(), synthesize_received(GnssParams{}, sample_compound(), 0.0, kN, kFs, b).samples());
  EXPECT_NE(ra.samples(), synthesize_received(GnssParams{}, sample_compound(), 0.0, kN, kFs, c).samples());
}

TEST(Taxonomy, ClassPairs) {
  EXPECT_EQ(class_id_for(JammerKind::Stj, JammerKind::Pbnj), 0);
  EXPECT_EQ(class_id_for(JammerKind::Lfmj, JammerKind::Ppnj), 8);
  EXPECT_THROW(class_id_for(JammerKind::Stj, JammerKind::Mtj), InvalidArgument);
  EXPECT_EQ(class_name(4), "MTJ+LFMJ");
}

}  // namespace
}  // namespace jamforge
