// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "housebot/json_io.hpp"
#include "housebot/prompting.hpp"
#include "housebot/tasks.hpp"

#include <array>
#include <chrono>
#include <functional>
#include <memory>
#include <optional>
#include <semaphore>
#include <string>
#include <variant>
#include <vector>

namespace housebot {

/// JSON-schema descriptions of the five robot functions in the
/// chat-completions "tools" layout.
class ToolSchema {
public:
    explicit ToolSchema(const PromptTable& prompts);

    static const ToolSchema& standard();

    /// The "tools" array restricted to `allowed`, in canonical order.
    json tools_json(const ActionSet& allowed) const;
    const json& function_json(ActionName name) const { return functions_[static_cast<std::size_t>(name)]; }

    /// Parses and validates one call. Calls to functions outside `allowed`
    /// are rejected like any other schema violation.
    std::variant<ActionCall, std::string> validate(std::string_view name, std::string_view arguments,
                                                   const ActionSet& allowed) const;

private:
    std::array<json, 5> functions_;
};

struct AgentRequest {
    const Conversation& conversation;
    const TaskInstance& instance;  // privileged; only scripted agents may look at it
    const ToolSchema& schema;
    ActionSet allowed;
    Expect expect = Expect::tool_call;
};

enum class ReplyKind : std::uint8_t { text, tool_call, malformed };

struct AgentReply {
    ReplyKind kind = ReplyKind::text;
    std::string text;
    std::optional<ActionCall> call;
    std::string call_id;
    std::string raw;    // original payload, kept verbatim for malformed replies
    std::string error;  // why a reply is malformed
    std::chrono::duration<double> wait{0.0};
    int discarded_calls = 0;

    static AgentReply make_text(std::string text);
    static AgentReply make_call(ActionCall call, std::string id = {});
    static AgentReply make_malformed(std::string raw, std::string error);
};

/// Produces the next reply of an episode. Implementations shared between
/// concurrent episodes must be thread-safe.
class Agent {
public:
    virtual ~Agent() = default;

    /// Throws TransportError for infrastructure failures.
    virtual AgentReply complete(const AgentRequest& request) = 0;

    /// Called once after the episode ends with the final conversation.
    virtual void finish(const Conversation&) {}

    virtual std::string model() const = 0;
    virtual double temperature() const { return 0.0; }
};

struct BackendConfig {
    std::string name;
    std::string endpoint = "https://api.openai.com/v1";
    std::string model;
    double temperature = 0.0;
    std::string api_key_env = "OPENAI_API_KEY";  // empty: send no Authorization header
    double timeout_s = 60.0;
    int max_retries = 3;
    double retry_backoff_s = 1.0;
    int max_in_flight = 4;

    bool operator==(const BackendConfig&) const = default;
};

/// Serializes a conversation into the chat-completions "messages" array.
json wire_messages(const Conversation& conv);

/// Builds the full request body.
json completion_request(const BackendConfig& config, const Conversation& conv, const ToolSchema& schema,
                        const ActionSet& allowed);

/// Classifies a chat-completions response body. Throws TransportError when
/// the body is not a chat-completions response at all.
AgentReply parse_completion(const json& body, const ToolSchema& schema, const ActionSet& allowed);

/// Remote agent speaking the chat-completions protocol over HTTP(S).
class ChatCompletionsAgent final : public Agent {
public:
    /// Throws ConfigError when the API key variable is unset or the endpoint is malformed.
    explicit ChatCompletionsAgent(BackendConfig config);

    AgentReply complete(const AgentRequest& request) override;
    std::string model() const override { return config_.model; }
    double temperature() const override { return config_.temperature; }

    const BackendConfig& config() const { return config_; }

private:
    BackendConfig config_;
    std::string api_key_;
    std::string origin_;     // scheme://host[:port]
    std::string base_path_;  // path prefix, e.g. /v1
    std::unique_ptr<std::counting_semaphore<>> in_flight_;
};

/// Privileged agent that follows oracle_plan. Stateless.
class OracleAgent final : public Agent {
public:
    AgentReply complete(const AgentRequest& request) override;
    std::string model() const override { return "oracle"; }
};

/// Replays the assistant turns of a recorded transcript and checks that the
/// live tool responses match the recorded ones byte for byte.
class ReplayAgent final : public Agent {
public:
    explicit ReplayAgent(std::vector<Message> recorded, std::string model = "replay");

    /// Throws ReplayMismatch on divergence, ReplayExhausted when no recorded turn is left.
    AgentReply complete(const AgentRequest& request) override;

    /// Checks the tool responses after the last reply and that every recorded turn was used.
    void finish(const Conversation& conv) override;

    std::string model() const override { return model_; }

private:
    void verify(const Conversation& conv) const;

    std::vector<Message> recorded_;
    std::vector<std::size_t> assistant_turns_;  // indices into recorded_
    std::size_t cursor_ = 0;
    std::string model_;
};

/// Agent driven by a callback; used for tests and scripted baselines.
class ScriptedAgent final : public Agent {
public:
    using Script = std::function<AgentReply(const AgentRequest&)>;

    explicit ScriptedAgent(Script script, std::string model = "scripted")
        : script_(std::move(script)), model_(std::move(model)) {}

    AgentReply complete(const AgentRequest& request) override { return script_(request); }
    std::string model() const override { return model_; }

private:
    Script script_;
    std::string model_;
};

/// Index of the task instruction in a conversation, skipping any worked example.
std::size_t instruction_index(const Conversation& conv);

} // namespace housebot
