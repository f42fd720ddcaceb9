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

#include <json.hpp>

#include "jamforge/dataset/dataset.hpp"

// nlohmann::json conversions for the provenance records.
namespace jamforge {
void to_json(nlohmann::json& j, const Tone& t);
void from_json(const nlohmann::json& j, Tone& t);
void to_json(nlohmann::json& j, const JammerSpec& s);
void from_json(const nlohmann::json& j, JammerSpec& s);
void to_json(nlohmann::json& j, const CompoundSpec& s);
void from_json(const nlohmann::json& j, CompoundSpec& s);
void to_json(nlohmann::json& j, const GnssParams& g);
void from_json(const nlohmann::json& j, GnssParams& g);
}  // namespace jamforge

namespace jamforge::tf {
void to_json(nlohmann::json& j, const CwdConfig& c);
void from_json(const nlohmann::json& j, CwdConfig& c);
}  // namespace jamforge::tf

namespace jamforge::dataset {
void to_json(nlohmann::json& j, const JammerRanges& r);
void from_json(const nlohmann::json& j, JammerRanges& r);
void to_json(nlohmann::json& j, const DatasetConfig& c);
void from_json(const nlohmann::json& j, DatasetConfig& c);
void to_json(nlohmann::json& j, const SampleRecord& r);
void from_json(const nlohmann::json& j, SampleRecord& r);
}  // namespace jamforge::dataset
