// SPDX-License-Identifier: Apache-2.0
#include "housebot/prompting.hpp"

#include "housebot/errors.hpp"
#include "housebot/json_io.hpp"
#include "housebot/resources.hpp"

#include <algorithm>
#include <cctype>

namespace housebot {

namespace {

constexpr std::array<std::string_view, 4> kRoleNames{"system", "user", "assistant", "tool"};
constexpr std::array<std::string_view, 2> kExpectNames{"text_reply", "tool_call"};
constexpr std::array<std::string_view, 9> kTagNames{
    "none",           "example",          "instruction",       "plan_prompt",     "act_prompt",
    "reason_prompt",  "action_prompt",    "state_description", "malformed_reply",
};

template <typename Enum, std::size_t N>
std::optional<Enum> lookup(const std::array<std::string_view, N>& names, std::string_view name) {
    for (std::size_t i = 0; i < N; ++i) {
        if (names[i] == name)
            return static_cast<Enum>(i);
    }
    return std::nullopt;
}

const std::array<TechniquePreset, 9> kPresets{{
    {"baseline", {}},
    {"af", {.adaptive_functions = true}},
    {"af_eip", {.adaptive_functions = true, .example_in_prompt = true}},
    {"af_cot", {.adaptive_functions = true, .cot = true}},
    {"af_cot_eip", {.adaptive_functions = true, .cot = true, .example_in_prompt = true}},
    {"af_react_eip", {.adaptive_functions = true, .react = true, .example_in_prompt = true}},
    {"af_std", {.adaptive_functions = true, .state_description = true}},
    {"af_cot_eip_std", {.adaptive_functions = true, .cot = true, .example_in_prompt = true, .state_description = true}},
    {"af_react_eip_std",
     {.adaptive_functions = true, .react = true, .example_in_prompt = true, .state_description = true}},
}};

Message system_message(const std::string& text, MessageTag tag) {
    return Message{.role = Role::system, .content = text, .tag = tag};
}

std::string lowercase(std::string_view s) {
    std::string out;
    for (char c : s)
        out += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return out;
}

} // namespace

std::string_view to_string(Role role) { return kRoleNames[static_cast<std::size_t>(role)]; }
std::optional<Role> parse_role(std::string_view name) { return lookup<Role>(kRoleNames, name); }
std::string_view to_string(Expect expect) { return kExpectNames[static_cast<std::size_t>(expect)]; }
std::optional<Expect> parse_expect(std::string_view name) { return lookup<Expect>(kExpectNames, name); }
std::string_view to_string(MessageTag tag) { return kTagNames[static_cast<std::size_t>(tag)]; }
std::optional<MessageTag> parse_message_tag(std::string_view name) { return lookup<MessageTag>(kTagNames, name); }

void TechniqueConfig::validate() const {
    if (cot && react)
        throw ConfigError("technique '" + label() + "' combines CoT and ReAct, which are mutually exclusive");
}

std::string TechniqueConfig::label() const {
    std::vector<std::string_view> parts;
    if (adaptive_functions)
        parts.push_back("AF");
    if (cot)
        parts.push_back("CoT");
    if (react)
        parts.push_back("ReAct");
    if (example_in_prompt)
        parts.push_back("EiP");
    if (state_description)
        parts.push_back("StD");
    if (parts.empty())
        return "Baseline";
    std::string out;
    for (auto part : parts) {
        if (!out.empty())
            out += " + ";
        out += part;
    }
    return out;
}

std::string TechniqueConfig::slug() const {
    std::string out;
    for (char c : label()) {
        if (c == ' ')
            continue;
        out += c == '+' ? '_' : static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    }
    return out;
}

const std::array<TechniquePreset, 9>& technique_presets() { return kPresets; }

TechniqueConfig parse_technique(std::string_view spec) {
    TechniqueConfig config;
    std::string token;
    auto flush = [&] {
        if (token.empty())
            return;
        if (token == "af")
            config.adaptive_functions = true;
        else if (token == "cot")
            config.cot = true;
        else if (token == "react")
            config.react = true;
        else if (token == "eip")
            config.example_in_prompt = true;
        else if (token == "std")
            config.state_description = true;
        else if (token != "baseline")
            throw ConfigError("unknown technique '" + token + "' in '" + std::string{spec} + "'");
        token.clear();
    };
    for (char c : lowercase(spec)) {
        if (c == '+' || c == '_' || c == ',')
            flush();
        else if (c != ' ')
            token += c;
    }
    flush();
    config.validate();
    return config;
}

int technique_rank(const TechniqueConfig& config) {
    for (std::size_t i = 0; i < kPresets.size(); ++i) {
        if (kPresets[i].config == config)
            return static_cast<int>(i);
    }
    return static_cast<int>(kPresets.size());
}

PromptTable PromptTable::parse(std::string_view json_text) {
    PromptTable table;
    try {
        auto j = json::parse(json_text);
        table.version = j.at("version").get<int>();
        table.cot_plan = j.at("cot_plan").get<std::string>();
        table.cot_act = j.at("cot_act").get<std::string>();
        table.react_reason = j.at("react_reason").get<std::string>();
        table.react_act = j.at("react_act").get<std::string>();
        const auto& s = j.at("state_description");
        table.state = StateText{
            s.at("header").get<std::string>(),        s.at("objects_label").get<std::string>(),
            s.at("no_observations").get<std::string>(), s.at("carrying_label").get<std::string>(),
            s.at("nothing_carried").get<std::string>(), s.at("robot_label").get<std::string>(),
            s.at("operator_label").get<std::string>(),
        };
        for (const auto& [name, tool] : j.at("tools").items()) {
            if (!parse_action_name(name))
                throw ConfigError("prompt table describes unknown function '" + name + "'");
            ToolText text;
            text.description = tool.at("description").get<std::string>();
            for (const auto& [param, description] : tool.at("parameters").items())
                text.parameters[param] = description.get<std::string>();
            table.tools[name] = std::move(text);
        }
    } catch (const json::exception& e) {
        throw ParseError(std::string{"prompt table: "} + e.what());
    }
    for (auto name : kAllActions) {
        if (!table.tools.contains(std::string{to_string(name)}))
            throw ConfigError("prompt table lacks a description of '" + std::string{to_string(name)} + "'");
    }
    return table;
}

const PromptTable& PromptTable::builtin() {
    static const PromptTable table = parse(resources::prompts_json());
    return table;
}

void RobotKnowledge::update(const ActionCall& call, const ActionResponse& response) {
    if (!response.ok)
        return;
    auto& here = observed[static_cast<std::size_t>(robot_location)];
    if (const auto* drive = std::get_if<DriveTo>(&call)) {
        robot_location = drive->location;
    } else if (std::holds_alternative<FindObjects>(call)) {
        for (const auto& [name, count] : response.observed)
            here[name] = count;
    } else if (const auto* grasp = std::get_if<GraspObject>(&call)) {
        if (auto it = here.find(grasp->object_name); it != here.end() && it->second > 0)
            --it->second;
        carried.push_back(grasp->object_name);
    } else if (const auto* place = std::get_if<PlaceObject>(&call)) {
        ++here[place->object_name];
        if (auto it = std::find(carried.begin(), carried.end(), place->object_name); it != carried.end())
            carried.erase(it);
    }
}

std::string render_state_description(const RobotKnowledge& knowledge, const PromptTable& prompts) {
    const auto& text = prompts.state;
    std::string out = text.header + "\n" + text.objects_label;
    bool any = false;
    for (auto room : kAllRooms) {
        const auto& items = knowledge.observed[static_cast<std::size_t>(room)];
        if (items.empty())
            continue;
        any = true;
        out += "\n- " + std::string{to_string(room)} + ":";
        bool first = true;
        for (const auto& [name, count] : items) {
            out += first ? " " : ", ";
            out += name + " ×" + std::to_string(count);
            first = false;
        }
    }
    if (!any)
        out += " " + text.no_observations;

    out += "\n" + text.carrying_label + " ";
    if (knowledge.carried.empty()) {
        out += text.nothing_carried;
    } else {
        for (std::size_t i = 0; i < knowledge.carried.size(); ++i)
            out += (i ? ", " : "") + knowledge.carried[i];
    }
    out += "\n" + text.robot_label + " " + std::string{to_string(knowledge.robot_location)};
    out += "\n" + text.operator_label + " " + std::string{to_string(knowledge.operator_location)};
    return out;
}

WorkedExample parse_worked_example(std::string_view json_text) {
    WorkedExample example;
    try {
        auto j = json::parse(json_text);
        example.instruction = j.at("instruction").get<std::string>();
        example.world = j.at("world").get<WorldState>();
        for (const auto& m : j.at("messages")) {
            auto message = m.get<Message>();
            message.tag = MessageTag::example;
            example.messages.push_back(std::move(message));
        }
    } catch (const json::exception& e) {
        throw ConfigError(std::string{"worked example: "} + e.what());
    } catch (const ParseError& e) {
        throw ConfigError(std::string{"worked example: "} + e.what());
    }
    if (example.messages.empty() || example.messages.front().role != Role::user ||
        example.messages.front().content != example.instruction)
        throw ConfigError("worked example must start with its task message");
    return example;
}

const WorkedExample& builtin_worked_example() {
    static const WorkedExample example = parse_worked_example(resources::eip_example_json());
    return example;
}

Conversation build_initial_context(const TaskInstance& instance, const TechniqueConfig& config,
                                   const PromptTable& prompts, const WorkedExample& example) {
    config.validate();
    Conversation conv;
    if (config.example_in_prompt)
        conv.messages = example.messages;
    conv.messages.push_back(Message{.role = Role::user, .content = instance.instruction, .tag = MessageTag::instruction});
    if (config.cot) {
        conv.messages.push_back(system_message(prompts.cot_plan, MessageTag::plan_prompt));
        conv.awaiting_plan = true;
    }
    return conv;
}

TurnPlan next_turn(Conversation& conv, const RobotKnowledge& knowledge, const WorldState& world,
                   const TechniqueConfig& config, const PromptTable& prompts) {
    std::erase_if(conv.messages, [](const Message& m) { return m.tag == MessageTag::state_description; });

    TurnPlan plan;
    plan.allowed = config.adaptive_functions ? available_actions(world) : ActionSet::all();

    if (config.cot) {
        if (!conv.awaiting_plan && conv.calls_since_plan >= kReplanInterval) {
            conv.messages.push_back(system_message(prompts.cot_plan, MessageTag::plan_prompt));
            conv.calls_since_plan = 0;
            conv.awaiting_plan = true;
            conv.plan_received = false;
        }
        if (conv.awaiting_plan) {
            plan.expect = Expect::text_reply;
        } else if (conv.plan_received) {
            conv.messages.push_back(system_message(prompts.cot_act, MessageTag::act_prompt));
            conv.plan_received = false;
        }
    } else if (config.react) {
        if (conv.has_pending_reasoning) {
            conv.messages.push_back(system_message(prompts.react_act, MessageTag::action_prompt));
        } else {
            conv.messages.push_back(system_message(prompts.react_reason, MessageTag::reason_prompt));
            plan.expect = Expect::text_reply;
        }
    }

    if (config.state_description)
        conv.messages.push_back(system_message(render_state_description(knowledge, prompts), MessageTag::state_description));
    return plan;
}

void record_text_reply(Conversation& conv, std::string text, const TurnPlan& plan, TurnInfo info) {
    conv.messages.push_back(Message{.role = Role::assistant, .content = std::move(text), .turn = info});
    if (conv.awaiting_plan) {
        conv.awaiting_plan = false;
        conv.plan_received = true;
    }
    if (plan.expect == Expect::text_reply)
        conv.has_pending_reasoning = true;
}

void record_tool_exchange(Conversation& conv, ToolCallRecord call, std::string assistant_text,
                          const ActionResponse& response, TurnInfo info) {
    std::string id = call.id;
    conv.messages.push_back(Message{
        .role = Role::assistant,
        .content = std::move(assistant_text),
        .tool_call = std::move(call),
        .turn = info,
    });
    conv.messages.push_back(Message{.role = Role::tool, .content = response.text, .tool_call_id = std::move(id)});
    ++conv.tool_calls;
    ++conv.calls_since_plan;
    conv.awaiting_plan = false;
    conv.plan_received = false;
    conv.has_pending_reasoning = false;
}

} // namespace housebot
