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

#include "jamforge/dataset/json_io.hpp"

namespace jamforge {

using nlohmann::json;

void to_json(json& j, const Tone& t) {
  j = json{{"power", t.power}, {"freq_hz", t.freq_hz}, {"phase_rad", t.phase_rad}};
}

void from_json(const json& j, Tone& t) {
  j.at("power").get_to(t.power);
  j.at("freq_hz").get_to(t.freq_hz);
  j.at("phase_rad").get_to(t.phase_rad);
}

void to_json(json& j, const JammerSpec& s) {
  j = json{{"kind", std::string(to_string(s.kind))}, {"fc_hz", s.fc_hz}, {"phase_rad", s.phase_rad}};
  if (!s.tones.empty()) j["tones"] = s.tones;
  if (s.bandwidth_hz) j["bandwidth_hz"] = *s.bandwidth_hz;
  if (s.sweep_period_s) j["sweep_period_s"] = *s.sweep_period_s;
  if (s.pulse_period_s) j["pulse_period_s"] = *s.pulse_period_s;
  if (s.pulse_width_s) j["pulse_width_s"] = *s.pulse_width_s;
}

void from_json(const json& j, JammerSpec& s) {
  s = JammerSpec{};
  s.kind = jammer_kind_from_string(j.at("kind").get<std::string>());
  j.at("fc_hz").get_to(s.fc_hz);
  j.at("phase_rad").get_to(s.phase_rad);
  if (j.contains("tones")) j.at("tones").get_to(s.tones);
  if (j.contains("bandwidth_hz")) s.bandwidth_hz = j.at("bandwidth_hz").get<double>();
  if (j.contains("sweep_period_s")) s.sweep_period_s = j.at("sweep_period_s").get<double>();
  if (j.contains("pulse_period_s")) s.pulse_period_s = j.at("pulse_period_s").get<double>();
  if (j.contains("pulse_width_s")) s.pulse_width_s = j.at("pulse_width_s").get<double>();
}

void to_json(json& j, const CompoundSpec& s) {
  j = json{{"class_id", s.class_id}, {"class_name", class_name(s.class_id)}, {"pr_db", s.pr_db},
           {"first", s.first}, {"second", s.second}};
}

void from_json(const json& j, CompoundSpec& s) {
  j.at("class_id").get_to(s.class_id);
  j.at("pr_db").get_to(s.pr_db);
  j.at("first").get_to(s.first);
  j.at("second").get_to(s.second);
}

void to_json(json& j, const GnssParams& g) {
  j = json{{"power_c", g.power_c},         {"prn", g.prn},
           {"doppler_f0_hz", g.doppler_f0_hz}, {"phase_phi0_rad", g.phase_phi0_rad},
           {"delay_tau0_s", g.delay_tau0_s},   {"code_rate_hz", g.code_rate_hz},
           {"data_rate_hz", g.data_rate_hz},   {"cn0_dbhz", g.cn0_dbhz}};
}

void from_json(const json& j, GnssParams& g) {
  j.at("power_c").get_to(g.power_c);
  j.at("prn").get_to(g.prn);
  j.at("doppler_f0_hz").get_to(g.doppler_f0_hz);
  j.at("phase_phi0_rad").get_to(g.phase_phi0_rad);
  j.at("delay_tau0_s").get_to(g.delay_tau0_s);
  j.at("code_rate_hz").get_to(g.code_rate_hz);
  j.at("data_rate_hz").get_to(g.data_rate_hz);
  j.at("cn0_dbhz").get_to(g.cn0_dbhz);
}

}  // namespace jamforge

namespace jamforge::tf {

void to_json(nlohmann::json& j, const CwdConfig& c) {
  j = nlohmann::json{{"sigma", c.sigma},
                     {"lag_half_length", c.lag_half_length},
                     {"time_frames", c.time_frames},
                     {"freq_bins", c.freq_bins}};
}

void from_json(const nlohmann::json& j, CwdConfig& c) {
  j.at("sigma").get_to(c.sigma);
  j.at("lag_half_length").get_to(c.lag_half_length);
  j.at("time_frames").get_to(c.time_frames);
  j.at("freq_bins").get_to(c.freq_bins);
}

}  // namespace jamforge::tf

namespace jamforge::dataset {

using nlohmann::json;

void to_json(json& j, const JammerRanges& r) {
  j = json{{"fc_min_hz", r.fc_min_hz},
           {"fc_max_hz", r.fc_max_hz},
           {"bandwidth_min_hz", r.bandwidth_min_hz},
           {"bandwidth_max_hz", r.bandwidth_max_hz},
           {"mtj_tones_min", r.mtj_tones_min},
           {"mtj_tones_max", r.mtj_tones_max},
           {"mtj_min_spacing_hz", r.mtj_min_spacing_hz},
           {"ppnj_periods_min", r.ppnj_periods_min},
           {"ppnj_periods_max", r.ppnj_periods_max},
           {"ppnj_duty_min", r.ppnj_duty_min},
           {"ppnj_duty_max", r.ppnj_duty_max},
           {"ppnj_bandwidth_hz", r.ppnj_bandwidth_hz}};
}

void from_json(const json& j, JammerRanges& r) {
  j.at("fc_min_hz").get_to(r.fc_min_hz);
  j.at("fc_max_hz").get_to(r.fc_max_hz);
  j.at("bandwidth_min_hz").get_to(r.bandwidth_min_hz);
  j.at("bandwidth_max_hz").get_to(r.bandwidth_max_hz);
  j.at("mtj_tones_min").get_to(r.mtj_tones_min);
  j.at("mtj_tones_max").get_to(r.mtj_tones_max);
  j.at("mtj_min_spacing_hz").get_to(r.mtj_min_spacing_hz);
  j.at("ppnj_periods_min").get_to(r.ppnj_periods_min);
  j.at("ppnj_periods_max").get_to(r.ppnj_periods_max);
  j.at("ppnj_duty_min").get_to(r.ppnj_duty_min);
  j.at("ppnj_duty_max").get_to(r.ppnj_duty_max);
  j.at("ppnj_bandwidth_hz").get_to(r.ppnj_bandwidth_hz);
}

void to_json(json& j, const DatasetConfig& c) {
  j = json{{"jnr_grid_db", c.jnr_grid_db},
           {"pr_db", c.pr_db},
           {"samples_per_class_per_jnr", c.samples_per_class_per_jnr},
           {"classes", c.classes},
           {"master_seed", c.master_seed},
           {"n", c.n},
           {"fs_hz", c.fs_hz},
           {"gnss", c.gnss},
           {"cwd", c.cwd},
           {"ranges", c.ranges}};
}

void from_json(const json& j, DatasetConfig& c) {
  j.at("jnr_grid_db").get_to(c.jnr_grid_db);
  j.at("pr_db").get_to(c.pr_db);
  j.at("samples_per_class_per_jnr").get_to(c.samples_per_class_per_jnr);
  j.at("classes").get_to(c.classes);
  j.at("master_seed").get_to(c.master_seed);
  j.at("n").get_to(c.n);
  j.at("fs_hz").get_to(c.fs_hz);
  j.at("gnss").get_to(c.gnss);
  j.at("cwd").get_to(c.cwd);
  j.at("ranges").get_to(c.ranges);
}

void to_json(json& j, const SampleRecord& r) {
  j = json{{"index", r.index},
           {"class_id", r.class_id},
           {"jnr_db", r.jnr_db},
           {"pr_db", r.pr_db},
           {"jnr_index", r.jnr_index},
           {"pr_index", r.pr_index},
           {"sample_index", r.sample_index},
           {"seed", r.seed},
           {"first", r.spec.first},
           {"second", r.spec.second},
           {"offset", r.offset},
           {"degenerate", r.degenerate}};
}

void from_json(const json& j, SampleRecord& r) {
  j.at("index").get_to(r.index);
  j.at("class_id").get_to(r.class_id);
  j.at("jnr_db").get_to(r.jnr_db);
  j.at("pr_db").get_to(r.pr_db);
  j.at("jnr_index").get_to(r.jnr_index);
  j.at("pr_index").get_to(r.pr_index);
  j.at("sample_index").get_to(r.sample_index);
  j.at("seed").get_to(r.seed);
  j.at("first").get_to(r.spec.first);
  j.at("second").get_to(r.spec.second);
  r.spec.pr_db = r.pr_db;
  r.spec.class_id = r.class_id;
  j.at("offset").get_to(r.offset);
  j.at("degenerate").get_to(r.degenerate);
}

}  // namespace jamforge::dataset
