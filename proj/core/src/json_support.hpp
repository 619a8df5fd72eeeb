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

// Internal helpers shared by config_io.cpp and experiment.cpp.

#ifndef ARISRSMA_JSON_SUPPORT_HPP
#define ARISRSMA_JSON_SUPPORT_HPP

#include <string>

#include <json.hpp>

#include "arisrsma/scenario.hpp"

namespace arisrsma::detail
{

/// Maps keys and byte offsets of a JSON document back to 1-based lines.
class LineLocator
{
public:
    explicit LineLocator(std::string text) : text_(std::move(text)) {}

    int line_of_offset(std::size_t byte) const;
    /// Line of the first occurrence of "key" (quoted), or 0 when absent.
    int line_of_key(const std::string& key) const;

    /// ConfigError with a "line N: " prefix when the key can be located.
    [[noreturn]] void fail(const std::string& key, const std::string& what) const;

    const std::string& text() const { return text_; }

private:
    std::string text_;
};

/// Parses text, converting parse errors into line-anchored ConfigErrors.
nlohmann::json parse_json(const LineLocator& loc);

/// Reads SystemConfig keys from \p obj (see config_io.hpp for the schema).
SystemConfig system_config_from_json(const nlohmann::json& obj, const LineLocator& loc);

nlohmann::json system_config_to_json(const SystemConfig& cfg);

} // namespace arisrsma::detail

#endif // ARISRSMA_JSON_SUPPORT_HPP
