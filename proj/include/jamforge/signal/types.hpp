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
#include <complex>
#include <cstddef>
#include <numbers>
#include <optional>
#include <string_view>
#include <vector>

namespace jamforge {

using Complex = std::complex<double>;

/// Uniformly sampled complex baseband capture.
class ComplexSignal {
 public:
  ComplexSignal(std::vector<Complex> samples, double sample_rate_hz);

  const std::vector<Complex>& samples() const noexcept { return samples_; }
  std::vector<Complex>& samples() noexcept { return samples_; }
  double sample_rate_hz() const noexcept { return sample_rate_hz_; }
  std::size_t size() const noexcept { return samples_.size(); }
  const Complex& operator[](std::size_t i) const { return samples_[i]; }

 private:
  std::vector<Complex> samples_;
  double sample_rate_hz_;
};

/// Satellite signal parameters. Defaults follow the simulated GPS L1 C/A setup.
struct GnssParams {
  double power_c = 1.0;
  int prn = 1;
  double doppler_f0_hz = 1000.0;
  double phase_phi0_rad = std::numbers::pi / 4.0;
  double delay_tau0_s = 0.0;
  double code_rate_hz = 1.023e6;
  double data_rate_hz = 50.0;
  double cn0_dbhz = 40.0;

  void validate() const;
};

enum class JammerKind { Stj = 0, Mtj = 1, Pbnj = 2, Lfmj = 3, Ppnj = 4 };

inline constexpr std::array<JammerKind, 5> kAllJammerKinds = {
    JammerKind::Stj, JammerKind::Mtj, JammerKind::Pbnj, JammerKind::Lfmj, JammerKind::Ppnj};

std::string_view to_string(JammerKind kind);
JammerKind jammer_kind_from_string(std::string_view name);

struct Tone {
  double power = 1.0;
  double freq_hz = 0.0;
  double phase_rad = 0.0;

  friend bool operator==(const Tone&, const Tone&) = default;
};

/// Declarative description of a single jammer. Only the optional fields
/// relevant to `kind` are populated.
struct JammerSpec {
  JammerKind kind = JammerKind::Stj;
  double fc_hz = 0.0;
  double phase_rad = 0.0;
  std::vector<Tone> tones;                     // MTJ
  std::optional<double> bandwidth_hz;          // PBNJ, LFMJ; PPNJ metadata only
  std::optional<double> sweep_period_s;        // LFMJ
  std::optional<double> pulse_period_s;        // PPNJ
  std::optional<double> pulse_width_s;         // PPNJ

  void validate() const;

  static JammerSpec stj(double fc_hz, double phase_rad);
  static JammerSpec mtj(std::vector<Tone> tones);
  static JammerSpec pbnj(double fc_hz, double phase_rad, double bandwidth_hz);
  static JammerSpec lfmj(double fc_hz, double phase_rad, double bandwidth_hz, double sweep_period_s);
  static JammerSpec ppnj(double pulse_period_s, double pulse_width_s);

  friend bool operator==(const JammerSpec&, const JammerSpec&) = default;
};

inline constexpr int kNumClasses = 9;

/// class_id -> ordered jammer pair, in the canonical gallery order.
inline constexpr std::array<std::array<JammerKind, 2>, kNumClasses> kClassPairs = {{
    {JammerKind::Stj, JammerKind::Pbnj},
    {JammerKind::Stj, JammerKind::Lfmj},
    {JammerKind::Stj, JammerKind::Ppnj},
    {JammerKind::Mtj, JammerKind::Pbnj},
    {JammerKind::Mtj, JammerKind::Lfmj},
    {JammerKind::Mtj, JammerKind::Ppnj},
    {JammerKind::Pbnj, JammerKind::Lfmj},
    {JammerKind::Pbnj, JammerKind::Ppnj},
    {JammerKind::Lfmj, JammerKind::Ppnj},
}};

/// Canonical class index of an ordered pair; throws InvalidArgument for
/// pairs outside the nine-class taxonomy (including STJ+MTJ).
int class_id_for(JammerKind first, JammerKind second);

/// Short display name such as "STJ+PBNJ".
std::string class_name(int class_id);

struct CompoundSpec {
  JammerSpec first;
  JammerSpec second;
  double pr_db = 0.0;
  int class_id = 0;

  void validate() const;
};

}  // namespace jamforge
