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

#include "jamforge/signal/types.hpp"

#include <cmath>
#include <string>

#include "jamforge/errors.hpp"

namespace jamforge {

ComplexSignal::ComplexSignal(std::vector<Complex> samples, double sample_rate_hz)
    : samples_(std::move(samples)), sample_rate_hz_(sample_rate_hz) {
  if (samples_.empty()) {
    throw InvalidArgument("ComplexSignal: samples must be non-empty");
  }
  if (!(sample_rate_hz_ > 0.0) || !std::isfinite(sample_rate_hz_)) {
    throw InvalidArgument("ComplexSignal: sample rate must be positive and finite");
  }
}

void GnssParams::validate() const {
  if (!(power_c > 0.0)) {
    throw InvalidArgument("GnssParams: power_c must be positive");
  }
  if (prn < 1 || prn > 32) {
    throw InvalidArgument("GnssParams: prn must be in 1..32, got " + std::to_string(prn));
  }
  if (!std::isfinite(cn0_dbhz)) {
    throw InvalidArgument("GnssParams: cn0_dbhz must be finite");
  }
  if (!(code_rate_hz > 0.0) || !(data_rate_hz > 0.0)) {
    throw InvalidArgument("GnssParams: code and data rates must be positive");
  }
}

std::string_view to_string(JammerKind kind) {
  switch (kind) {
    case JammerKind::Stj: return "STJ";
    case JammerKind::Mtj: return "MTJ";
    case JammerKind::Pbnj: return "PBNJ";
    case JammerKind::Lfmj: return "LFMJ";
    case JammerKind::Ppnj: return "PPNJ";
  }
  return "?";
}

JammerKind jammer_kind_from_string(std::string_view name) {
  for (JammerKind kind : kAllJammerKinds) {
    if (to_string(kind) == name) {
      return kind;
    }
  }
  throw InvalidArgument("unknown jammer kind '" + std::string(name) + "'");
}

void JammerSpec::validate() const {
  auto require = [](bool ok, const char* what) {
    if (!ok) {
      throw InvalidArgument(std::string("JammerSpec: ") + what);
    }
  };
  switch (kind) {
    case JammerKind::Stj:
      break;
    case JammerKind::Mtj:
      require(tones.size() >= 2, "MTJ needs at least two tones");
      for (const Tone& t : tones) {
        require(t.power > 0.0, "tone powers must be positive");
      }
      for (std::size_t i = 0; i < tones.size(); ++i) {
        for (std::size_t k = i + 1; k < tones.size(); ++k) {
          require(tones[i].freq_hz != tones[k].freq_hz, "MTJ tone frequencies must be distinct");
        }
      }
      break;
    case JammerKind::Pbnj:
      require(bandwidth_hz.has_value() && *bandwidth_hz > 0.0, "PBNJ needs a positive bandwidth");
      break;
    case JammerKind::Lfmj:
      require(bandwidth_hz.has_value() && *bandwidth_hz > 0.0, "LFMJ needs a positive bandwidth");
      require(sweep_period_s.has_value() && *sweep_period_s > 0.0, "LFMJ needs a positive sweep period");
      break;
    case JammerKind::Ppnj:
      require(pulse_period_s.has_value() && pulse_width_s.has_value(), "PPNJ needs pulse period and width");
      require(*pulse_width_s > 0.0, "PPNJ pulse width must be positive");
      require(*pulse_width_s <= *pulse_period_s, "PPNJ pulse width must not exceed the period");
      break;
  }
}

JammerSpec JammerSpec::stj(double fc_hz, double phase_rad) {
  JammerSpec s;
  s.kind = JammerKind::Stj;
  s.fc_hz = fc_hz;
  s.phase_rad = phase_rad;
  return s;
}

JammerSpec JammerSpec::mtj(std::vector<Tone> tones) {
  JammerSpec s;
  s.kind = JammerKind::Mtj;
  if (!tones.empty()) {
    s.fc_hz = tones.front().freq_hz;
    s.phase_rad = tones.front().phase_rad;
  }
  s.tones = std::move(tones);
  return s;
}

JammerSpec JammerSpec::pbnj(double fc_hz, double phase_rad, double bandwidth_hz) {
  JammerSpec s;
  s.kind = JammerKind::Pbnj;
  s.fc_hz = fc_hz;
  s.phase_rad = phase_rad;
  s.bandwidth_hz = bandwidth_hz;
  return s;
}

JammerSpec JammerSpec::lfmj(double fc_hz, double phase_rad, double bandwidth_hz, double sweep_period_s) {
  JammerSpec s;
  s.kind = JammerKind::Lfmj;
  s.fc_hz = fc_hz;
  s.phase_rad = phase_rad;
  s.bandwidth_hz = bandwidth_hz;
  s.sweep_period_s = sweep_period_s;
  return s;
}

JammerSpec JammerSpec::ppnj(double pulse_period_s, double pulse_width_s) {
  JammerSpec s;
  s.kind = JammerKind::Ppnj;
  s.pulse_period_s = pulse_period_s;
  s.pulse_width_s = pulse_width_s;
  return s;
}

int class_id_for(JammerKind first, JammerKind second) {
  for (int id = 0; id < kNumClasses; ++id) {
    if (kClassPairs[id][0] == first && kClassPairs[id][1] == second) {
      return id;
    }
  }
  throw InvalidArgument("no compound class for pair (" + std::string(to_string(first)) + ", " +
                        std::string(to_string(second)) + ")");
}

std::string class_name(int class_id) {
  if (class_id < 0 || class_id >= kNumClasses) {
    throw InvalidArgument("class_id must be in 0..8, got " + std::to_string(class_id));
  }
  return std::string(to_string(kClassPairs[class_id][0])) + "+" +
         std::string(to_string(kClassPairs[class_id][1]));
}

void CompoundSpec::validate() const {
  first.validate();
  second.validate();
  const int expected = class_id_for(first.kind, second.kind);
  if (expected != class_id) {
    throw InvalidArgument("CompoundSpec: class_id " + std::to_string(class_id) +
                          " does not match pair index " + std::to_string(expected));
  }
  if (!std::isfinite(pr_db)) {
    throw InvalidArgument("CompoundSpec: pr_db must be finite");
  }
}

}  // namespace jamforge
