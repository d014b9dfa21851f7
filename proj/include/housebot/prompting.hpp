// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "housebot/tasks.hpp"
#include "housebot/world.hpp"

#include <array>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace housebot {

enum class Role : std::uint8_t { system, user, assistant, tool };

std::string_view to_string(Role role);
std::optional<Role> parse_role(std::string_view name);

/// What the harness asks the agent for on a given turn.
enum class Expect : std::uint8_t { text_reply, tool_call };

std::string_view to_string(Expect expect);
std::optional<Expect> parse_expect(std::string_view name);

/// Why a message is in the context. Not sent over the wire; used for
/// context editing and for structural checks on recorded transcripts.
enum class MessageTag : std::uint8_t {
    none,
    example,            // part of the prepended worked example
    instruction,        // the task given by the user
    plan_prompt,        // CoT: request for a plan
    act_prompt,         // CoT: switch to function calls
    reason_prompt,      // ReAct: request for one step of reasoning
    action_prompt,      // ReAct: request for one function call
    state_description,  // StD: rendered robot knowledge
    malformed_reply,    // agent output that failed schema validation
};

std::string_view to_string(MessageTag tag);
std::optional<MessageTag> parse_message_tag(std::string_view name);

struct ToolCallRecord {
    std::string id;
    ActionCall call;
    bool operator==(const ToolCallRecord&) const = default;
};

/// Per-turn bookkeeping attached to every agent reply.
struct TurnInfo {
    Expect expect = Expect::tool_call;
    ActionSet allowed;
    double wait_s = 0.0;
    int discarded_calls = 0;
    bool operator==(const TurnInfo&) const = default;
};

struct Message {
    Role role = Role::user;
    std::string content;
    std::optional<ToolCallRecord> tool_call;  // assistant only
    std::optional<std::string> tool_call_id;  // tool only
    MessageTag tag = MessageTag::none;
    std::optional<TurnInfo> turn;             // assistant replies produced during the episode

    bool operator==(const Message&) const = default;
};

struct TechniqueConfig {
    bool adaptive_functions = false;
    bool cot = false;
    bool react = false;
    bool example_in_prompt = false;
    bool state_description = false;

    /// Throws ConfigError when CoT and ReAct are both enabled.
    void validate() const;

    /// "Baseline", "AF + CoT + EiP + StD", ...
    std::string label() const;

    /// Filesystem-safe form of the label: "baseline", "af_cot_eip_std".
    std::string slug() const;

    bool operator==(const TechniqueConfig&) const = default;
};

struct TechniquePreset {
    std::string_view name;
    TechniqueConfig config;
};

/// The nine compared technique combinations, in table order.
const std::array<TechniquePreset, 9>& technique_presets();

/// Accepts a preset name ("af_cot_eip") or a '+'-joined flag list
/// ("af+react+std"; tokens af, cot, react, eip, std, baseline).
/// Throws ConfigError for unknown tokens or an invalid combination.
TechniqueConfig parse_technique(std::string_view spec);

/// Position of a technique label in table order; unknown labels sort last.
int technique_rank(const TechniqueConfig& config);

/// Every fixed prompt string, loaded from data/prompts.json.
struct PromptTable {
    int version = 0;
    std::string cot_plan;
    std::string cot_act;
    std::string react_reason;
    std::string react_act;

    struct StateText {
        std::string header;
        std::string objects_label;
        std::string no_observations;
        std::string carrying_label;
        std::string nothing_carried;
        std::string robot_label;
        std::string operator_label;
    } state;

    struct ToolText {
        std::string description;
        std::map<std::string, std::string> parameters;
    };
    std::map<std::string, ToolText> tools;

    static PromptTable parse(std::string_view json_text);
    static const PromptTable& builtin();
};

/// What the robot has perceived through its own actions.
struct RobotKnowledge {
    std::array<std::map<std::string, int, std::less<>>, 4> observed;
    std::vector<std::string> carried;
    Room robot_location = Room::parlor;
    Room operator_location = Room::parlor;

    /// Folds one executed call and its response into the knowledge.
    void update(const ActionCall& call, const ActionResponse& response);

    bool operator==(const RobotKnowledge&) const = default;
};

std::string render_state_description(const RobotKnowledge& knowledge,
                                     const PromptTable& prompts = PromptTable::builtin());

struct Conversation {
    std::vector<Message> messages;
    int calls_since_plan = 0;
    int tool_calls = 0;
    bool awaiting_plan = false;          // CoT: a plan prompt is waiting for its text reply
    bool plan_received = false;          // CoT: the plan arrived, the act prompt is due
    bool has_pending_reasoning = false;  // ReAct: reasoning arrived, the action prompt is due

    bool operator==(const Conversation&) const = default;
};

/// The recorded worked example prepended for example-in-prompt.
struct WorkedExample {
    std::string instruction;
    WorldState world;
    std::vector<Message> messages;  // user task, assistant calls and tool responses
};

const WorkedExample& builtin_worked_example();
WorkedExample parse_worked_example(std::string_view json_text);

inline constexpr int kReplanInterval = 15;

Conversation build_initial_context(const TaskInstance& instance, const TechniqueConfig& config,
                                   const PromptTable& prompts = PromptTable::builtin(),
                                   const WorkedExample& example = builtin_worked_example());

struct TurnPlan {
    ActionSet allowed;
    Expect expect = Expect::tool_call;
};

/// Edits the context for the next agent turn and says what to ask for.
TurnPlan next_turn(Conversation& conv, const RobotKnowledge& knowledge, const WorldState& world,
                   const TechniqueConfig& config, const PromptTable& prompts = PromptTable::builtin());

/// Appends a text reply and advances the technique phase.
void record_text_reply(Conversation& conv, std::string text, const TurnPlan& plan, TurnInfo info);

/// Appends an executed call and its tool response.
void record_tool_exchange(Conversation& conv, ToolCallRecord call, std::string assistant_text,
                          const ActionResponse& response, TurnInfo info);

} // namespace housebot
