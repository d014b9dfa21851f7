// SPDX-License-Identifier: Apache-2.0
#include "housebot/json_io.hpp"

#include "housebot/errors.hpp"

namespace housebot {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

const json& field(const json& j, const char* key) {
    if (!j.is_object() || !j.contains(key))
        throw ParseError(std::string{"missing field '"} + key + "'");
    return j.at(key);
}

template <typename T>
T get_as(const json& j, const char* key) {
    try {
        return field(j, key).get<T>();
    } catch (const json::exception& e) {
        throw ParseError(std::string{"field '"} + key + "': " + e.what());
    }
}

Room room_field(const json& j, const char* key) {
    auto name = get_as<std::string>(j, key);
    auto room = parse_room(name);
    if (!room)
        throw ParseError("unknown room '" + name + "'");
    return *room;
}

bool has_exactly(const json& args, std::initializer_list<const char*> keys) {
    if (!args.is_object() || args.size() != keys.size())
        return false;
    for (const char* key : keys) {
        if (!args.contains(key))
            return false;
    }
    return true;
}

} // namespace

std::variant<ActionCall, std::string> parse_action_call(std::string_view name, const json& arguments) {
    auto action = parse_action_name(name);
    if (!action)
        return "unknown function '" + std::string{name} + "'";
    if (!arguments.is_object())
        return std::string{"arguments must be a JSON object"};

    switch (*action) {
    case ActionName::drive_to_location: {
        if (!has_exactly(arguments, {"location"}) || !arguments["location"].is_string())
            return std::string{"drive_to_location expects exactly {\"location\": string}"};
        auto room = parse_room(arguments["location"].get<std::string>());
        if (!room)
            return "location '" + arguments["location"].get<std::string>() + "' is not one of the four rooms";
        return DriveTo{*room};
    }
    case ActionName::find_object: {
        if (!has_exactly(arguments, {"object_name_list"}) || !arguments["object_name_list"].is_array())
            return std::string{"find_object expects exactly {\"object_name_list\": [string]}"};
        FindObjects find;
        for (const auto& item : arguments["object_name_list"]) {
            if (!item.is_string())
                return std::string{"object_name_list must contain only strings"};
            find.object_names.push_back(item.get<std::string>());
        }
        return find;
    }
    case ActionName::grasp_object:
    case ActionName::place_object: {
        if (!has_exactly(arguments, {"object_name"}) || !arguments["object_name"].is_string())
            return std::string{to_string(*action)} + " expects exactly {\"object_name\": string}";
        auto object = arguments["object_name"].get<std::string>();
        if (*action == ActionName::grasp_object)
            return GraspObject{object};
        return PlaceObject{object};
    }
    case ActionName::exit:
        if (!arguments.empty())
            return std::string{"exit takes no arguments"};
        return Exit{};
    }
    return std::string{"unreachable"};
}

json action_arguments(const ActionCall& call) {
    return std::visit(overloaded{
                          [](const DriveTo& c) { return json{{"location", to_string(c.location)}}; },
                          [](const FindObjects& c) { return json{{"object_name_list", c.object_names}}; },
                          [](const GraspObject& c) { return json{{"object_name", c.object_name}}; },
                          [](const PlaceObject& c) { return json{{"object_name", c.object_name}}; },
                          [](const Exit&) { return json::object(); },
                      },
                      call);
}

void to_json(json& j, const ActionCall& call) {
    j = json{{"name", to_string(action_name(call))}, {"arguments", action_arguments(call)}};
}

void from_json(const json& j, ActionCall& call) {
    auto parsed = parse_action_call(get_as<std::string>(j, "name"), field(j, "arguments"));
    if (auto* error = std::get_if<std::string>(&parsed))
        throw ParseError(*error);
    call = std::get<ActionCall>(parsed);
}

void to_json(json& j, const WorldState& state) {
    json placements = json::object();
    for (auto room : kAllRooms)
        placements[std::string{to_string(room)}] = state.contents(room);
    j = json{
        {"placements", placements},
        {"robot_location", to_string(state.robot_location)},
        {"carried", state.carried},
        {"calls_executed", state.calls_executed},
    };
}

void from_json(const json& j, WorldState& state) {
    state = WorldState{};
    const auto& placements = field(j, "placements");
    if (!placements.is_object())
        throw ParseError("placements must be an object");
    for (const auto& [room_name, items] : placements.items()) {
        auto room = parse_room(room_name);
        if (!room)
            throw ParseError("unknown room '" + room_name + "'");
        for (const auto& [object, count] : items.items()) {
            if (!count.is_number_integer() || count.get<int>() < 0)
                throw ParseError("count of '" + object + "' must be a non-negative integer");
            state.set_count(*room, object, count.get<int>());
        }
    }
    state.robot_location = room_field(j, "robot_location");
    state.carried = get_as<std::vector<std::string>>(j, "carried");
    if (state.carried.size() > kCarryCapacity)
        throw ParseError("world carries more than two objects");
    state.calls_executed = j.value("calls_executed", 0);
}

void to_json(json& j, const TaskInstance& instance) {
    json params = std::visit(
        overloaded{
            [](const FetchParams& p) { return json{{"object", p.object}, {"room", to_string(p.room)}}; },
            [](const ConditionalParams& p) {
                return json{
                    {"probe_object", p.probe_object}, {"probe_room", to_string(p.probe_room)},
                    {"then_object", p.then_object},   {"then_room", to_string(p.then_room)},
                    {"else_object", p.else_object},   {"else_room", to_string(p.else_room)},
                };
            },
            [](const EqualsParams& p) {
                return json{{"counted_object", p.counted_object},
                            {"moved_object", p.moved_object},
                            {"room", to_string(p.room)}};
            },
            [](const DistributeParams& p) {
                return json{{"object", p.object}, {"start_room", to_string(p.start_room)}};
            },
        },
        instance.params);
    j = json{
        {"kind", to_string(instance.kind())},
        {"seed", instance.seed},
        {"instruction", instance.instruction},
        {"params", params},
        {"initial_world", instance.initial_world},
    };
}

void from_json(const json& j, TaskInstance& instance) {
    instance = TaskInstance{};
    TaskKind kind;
    try {
        kind = parse_task_kind(get_as<std::string>(j, "kind"));
    } catch (const ConfigError& e) {
        throw ParseError(e.what());
    }
    instance.seed = get_as<std::uint64_t>(j, "seed");
    instance.instruction = get_as<std::string>(j, "instruction");
    const auto& p = field(j, "params");
    switch (kind) {
    case TaskKind::fetch:
        instance.params = FetchParams{get_as<std::string>(p, "object"), room_field(p, "room")};
        break;
    case TaskKind::conditional:
        instance.params = ConditionalParams{
            get_as<std::string>(p, "probe_object"), room_field(p, "probe_room"),
            get_as<std::string>(p, "then_object"),  room_field(p, "then_room"),
            get_as<std::string>(p, "else_object"),  room_field(p, "else_room"),
        };
        break;
    case TaskKind::equals:
        instance.params = EqualsParams{get_as<std::string>(p, "counted_object"),
                                       get_as<std::string>(p, "moved_object"), room_field(p, "room")};
        break;
    case TaskKind::distribute:
        instance.params = DistributeParams{get_as<std::string>(p, "object"), room_field(p, "start_room")};
        break;
    }
    instance.initial_world = field(j, "initial_world").get<WorldState>();
}

void to_json(json& j, const TechniqueConfig& config) {
    j = json{
        {"adaptive_functions", config.adaptive_functions},
        {"cot", config.cot},
        {"react", config.react},
        {"example_in_prompt", config.example_in_prompt},
        {"state_description", config.state_description},
    };
}

void from_json(const json& j, TechniqueConfig& config) {
    config.adaptive_functions = get_as<bool>(j, "adaptive_functions");
    config.cot = get_as<bool>(j, "cot");
    config.react = get_as<bool>(j, "react");
    config.example_in_prompt = get_as<bool>(j, "example_in_prompt");
    config.state_description = get_as<bool>(j, "state_description");
}

void to_json(json& j, const Message& message) {
    j = json{{"role", to_string(message.role)}, {"content", message.content}};
    if (message.tool_call) {
        json call = message.tool_call->call;
        call["id"] = message.tool_call->id;
        j["tool_call"] = call;
    }
    if (message.tool_call_id)
        j["tool_call_id"] = *message.tool_call_id;
    if (message.tag != MessageTag::none)
        j["tag"] = to_string(message.tag);
    if (message.turn) {
        std::vector<std::string> allowed;
        for (auto name : message.turn->allowed.names())
            allowed.emplace_back(to_string(name));
        j["turn"] = json{
            {"expect", to_string(message.turn->expect)},
            {"allowed", allowed},
            {"wait_s", message.turn->wait_s},
            {"discarded_calls", message.turn->discarded_calls},
        };
    }
}

void from_json(const json& j, Message& message) {
    message = Message{};
    auto role = parse_role(get_as<std::string>(j, "role"));
    if (!role)
        throw ParseError("unknown role '" + get_as<std::string>(j, "role") + "'");
    message.role = *role;
    message.content = get_as<std::string>(j, "content");
    if (j.contains("tool_call")) {
        const auto& call = j.at("tool_call");
        message.tool_call = ToolCallRecord{get_as<std::string>(call, "id"), call.get<ActionCall>()};
    }
    if (j.contains("tool_call_id"))
        message.tool_call_id = get_as<std::string>(j, "tool_call_id");
    if (j.contains("tag")) {
        auto tag = parse_message_tag(get_as<std::string>(j, "tag"));
        if (!tag)
            throw ParseError("unknown message tag '" + get_as<std::string>(j, "tag") + "'");
        message.tag = *tag;
    }
    if (j.contains("turn")) {
        const auto& t = j.at("turn");
        TurnInfo info;
        auto expect = parse_expect(get_as<std::string>(t, "expect"));
        if (!expect)
            throw ParseError("unknown expectation '" + get_as<std::string>(t, "expect") + "'");
        info.expect = *expect;
        for (const auto& name : get_as<std::vector<std::string>>(t, "allowed")) {
            auto action = parse_action_name(name);
            if (!action)
                throw ParseError("unknown function '" + name + "'");
            info.allowed.insert(*action);
        }
        info.wait_s = get_as<double>(t, "wait_s");
        info.discarded_calls = t.value("discarded_calls", 0);
        message.turn = info;
    }
}

} // namespace housebot
