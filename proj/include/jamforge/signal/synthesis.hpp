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
#include <cstdint>
#include <vector>

#include "jamforge/signal/rng.hpp"
#include "jamforge/signal/types.hpp"

namespace jamforge {

inline constexpr std::size_t kCaCodeLength = 1023;

/// GPS C/A Gold code for `prn` (1..32) as +/-1 chips (logic 0 -> +1).
std::vector<std::int8_t> generate_ca_code(int prn);

/// Satellite baseband signal sqrt(2C) d(t - tau0) c(t - tau0) exp(j(2 pi f0 t + phi0)).
/// The carrier is removed; navigation bits are drawn from `rng`.
ComplexSignal generate_gnss_signal(const GnssParams& params, std::size_t n, double fs, Rng& rng);

ComplexSignal gen_stj(const JammerSpec& spec, std::size_t n, double fs);
ComplexSignal gen_mtj(const JammerSpec& spec, std::size_t n, double fs);
ComplexSignal gen_pbnj(const JammerSpec& spec, std::size_t n, double fs, Rng& rng);
ComplexSignal gen_lfmj(const JammerSpec& spec, std::size_t n, double fs);
ComplexSignal gen_ppnj(const JammerSpec& spec, std::size_t n, double fs);

/// Dispatches on spec.kind. `rng` is only consumed by PBNJ.
ComplexSignal generate_jammer(const JammerSpec& spec, std::size_t n, double fs, Rng& rng);

/// alpha * a + beta * b with beta^2 / alpha^2 = 10^(pr_db / 10) and alpha^2 + beta^2 = 1.
ComplexSignal compose_compound(const ComplexSignal& a, const ComplexSignal& b, double pr_db);

struct CompoundScales {
  double alpha;
  double beta;
};
CompoundScales compound_scales(double pr_db);

/// (1/N) sum |x[m]|^2.
double average_power(const ComplexSignal& x);

/// x / sqrt(sum |x[m]|^2), i.e. unit total energy.
ComplexSignal unit_normalize(const ComplexSignal& x);

/// x / sqrt(average_power(x)), i.e. unit average power.
ComplexSignal power_normalize(const ComplexSignal& x);

/// AWGN power implied by the carrier power, C/N0 and the sampling bandwidth.
double noise_power(const GnssParams& gnss, double fs);

/// All parts of one received capture r = s + j + n.
struct ReceivedCapture {
  ComplexSignal gnss;
  ComplexSignal jamming;
  ComplexSignal noise;
  ComplexSignal received;
  double target_noise_power;
};

/// Builds a capture whose jamming component realizes `jnr_db` against the
/// nominal noise power. Each jammer is power-normalized before composition so
/// the compound power ratio is exact. Consumes `rng` in the order: navigation
/// bits, first jammer, second jammer, noise.
ReceivedCapture synthesize_capture(const GnssParams& gnss, const CompoundSpec& jam, double jnr_db,
                                   std::size_t n, double fs, Rng& rng);

ComplexSignal synthesize_received(const GnssParams& gnss, const CompoundSpec& jam, double jnr_db,
                                  std::size_t n, double fs, Rng& rng);

namespace detail {

/// (1/A) sum_k sqrt(P_k) exp(j(2 pi f_k m / fs + phi_k)), A = sqrt(sum P_k).
/// Accepts a single tone; gen_stj is exactly this sum with one unit tone.
ComplexSignal tone_sum(const std::vector<Tone>& tones, std::size_t n, double fs);

}  // namespace detail

}  // namespace jamforge
