// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "housebot/prompting.hpp"
#include "housebot/tasks.hpp"
#include "housebot/world.hpp"

#include <nlohmann/json.hpp>

#include <string>
#include <string_view>
#include <variant>

namespace housebot {

using nlohmann::json;

/// Strictly validates `arguments` against the declared parameters of the
/// function `name`: unknown names, missing, extra or ill-typed keys and
/// locations outside the room enum all yield an error string.
std::variant<ActionCall, std::string> parse_action_call(std::string_view name, const json& arguments);

json action_arguments(const ActionCall& call);

// ADL hooks for nlohmann::json. Throw ParseError on malformed input.
void to_json(json& j, const ActionCall& call);
void from_json(const json& j, ActionCall& call);
void to_json(json& j, const WorldState& state);
void from_json(const json& j, WorldState& state);
void to_json(json& j, const TaskInstance& instance);
void from_json(const json& j, TaskInstance& instance);
void to_json(json& j, const TechniqueConfig& config);
void from_json(const json& j, TechniqueConfig& config);
void to_json(json& j, const Message& message);
void from_json(const json& j, Message& message);

} // namespace housebot
