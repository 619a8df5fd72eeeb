// SPDX-License-Identifier: Apache-2.0
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

///
/// \file config_io.hpp
///
/// JSON representation of SystemConfig. Powers and noise are given in dBm,
/// angles in degrees; everything else in SI units. Absent keys keep the
/// defaults of SystemConfig; unknown keys are rejected. Errors carry the
/// line of the offending key ("line 7: ...").
///
#ifndef ARISRSMA_CONFIG_IO_HPP
#define ARISRSMA_CONFIG_IO_HPP

#include <filesystem>
#include <string>

#include "arisrsma/scenario.hpp"

namespace arisrsma
{

SystemConfig parse_system_config(const std::string& json_text);
SystemConfig load_system_config(const std::filesystem::path& path);

/// Canonical JSON of \p cfg, accepted back by parse_system_config.
std::string to_json(const SystemConfig& cfg);

} // namespace arisrsma

#endif // ARISRSMA_CONFIG_IO_HPP
