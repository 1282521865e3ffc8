// Copyright 2026 The trackfuse Authors
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

#ifndef TRACKFUSE__CONFIG_HPP_
#define TRACKFUSE__CONFIG_HPP_

#include "trackfuse/pipeline.hpp"
#include "trackfuse/simulator.hpp"

#include <map>
#include <string>
#include <string_view>

namespace trackfuse
{

struct ConfigValue
{
  enum class Kind { boolean, number, string };
  Kind kind{Kind::string};
  std::string text;  // literal for numbers/booleans, unquoted content for strings
};

using FlatConfig = std::map<std::string, ConfigValue>;

/// Accepts either a flat JSON object or TOML-style `key = value` lines with
/// `#` comments. Values are numbers, true/false or double-quoted strings.
/// Throws SchemaError naming the source and line for syntax errors.
FlatConfig parse_flat_config(std::string_view text, std::string_view source = "<config>");

/// Overlay entries on defaults. Unknown keys and ill-typed values throw
/// SchemaError naming the field; the result is validated.
ScenarioConfig scenario_from_config(const FlatConfig & entries, ScenarioConfig base = {});
BoosterConfig booster_from_config(
  const FlatConfig & entries, BoosterConfig base = BoosterConfig::defaults());

/// Flat JSON snapshot with every key, suitable for re-reading.
std::string scenario_config_json(const ScenarioConfig & config);
std::string booster_config_json(const BoosterConfig & config);

}  // namespace trackfuse

#endif  // TRACKFUSE__CONFIG_HPP_
