// SPDX-License-Identifier: Apache-2.0
#include "housebot/backends.hpp"

#include "housebot/errors.hpp"

#include <httplib.h>

#include <cstdlib>
#include <regex>
#include <thread>

namespace housebot {

namespace {

using Clock = std::chrono::steady_clock;

class SemaphoreGuard {
public:
    explicit SemaphoreGuard(std::counting_semaphore<>& sem) : sem_(sem) { sem_.acquire(); }
    ~SemaphoreGuard() { sem_.release(); }
    SemaphoreGuard(const SemaphoreGuard&) = delete;
    SemaphoreGuard& operator=(const SemaphoreGuard&) = delete;

private:
    std::counting_semaphore<>& sem_;
};

bool retryable(int status) { return status == 429 || status >= 500; }

} // namespace

ToolSchema::ToolSchema(const PromptTable& prompts) {
    auto param = [&](ActionName action, const char* name) -> std::string {
        const auto& tool = prompts.tools.at(std::string{to_string(action)});
        auto it = tool.parameters.find(name);
        return it == tool.parameters.end() ? std::string{} : it->second;
    };
    json rooms = json::array();
    for (auto room : kAllRooms)
        rooms.push_back(std::string{to_string(room)});

    for (auto action : kAllActions) {
        const auto& tool = prompts.tools.at(std::string{to_string(action)});
        json properties = json::object();
        json required = json::array();
        switch (action) {
        case ActionName::drive_to_location:
            properties["location"] = {{"type", "string"}, {"enum", rooms}, {"description", param(action, "location")}};
            required.push_back("location");
            break;
        case ActionName::find_object:
            properties["object_name_list"] = {
                {"type", "array"},
                {"items", {{"type", "string"}}},
                {"description", param(action, "object_name_list")},
            };
            required.push_back("object_name_list");
            break;
        case ActionName::grasp_object:
        case ActionName::place_object:
            properties["object_name"] = {{"type", "string"}, {"description", param(action, "object_name")}};
            required.push_back("object_name");
            break;
        case ActionName::exit:
            break;
        }
        functions_[static_cast<std::size_t>(action)] = json{
            {"type", "function"},
            {"function",
             {
                 {"name", std::string{to_string(action)}},
                 {"description", tool.description},
                 {"parameters",
                  {{"type", "object"}, {"properties", properties}, {"required", required}, {"additionalProperties", false}}},
             }},
        };
    }
}

const ToolSchema& ToolSchema::standard() {
    static const ToolSchema schema{PromptTable::builtin()};
    return schema;
}

json ToolSchema::tools_json(const ActionSet& allowed) const {
    json tools = json::array();
    for (auto name : allowed.names())
        tools.push_back(function_json(name));
    return tools;
}

std::variant<ActionCall, std::string> ToolSchema::validate(std::string_view name, std::string_view arguments,
                                                           const ActionSet& allowed) const {
    auto parsed_args = json::parse(arguments, nullptr, false);
    if (parsed_args.is_discarded())
        return "arguments of '" + std::string{name} + "' are not valid JSON";
    auto call = parse_action_call(name, parsed_args);
    if (auto* ok = std::get_if<ActionCall>(&call); ok && !allowed.contains(action_name(*ok)))
        return "function '" + std::string{name} + "' is not available in this turn";
    return call;
}

AgentReply AgentReply::make_text(std::string text) {
    AgentReply reply;
    reply.kind = ReplyKind::text;
    reply.raw = text;
    reply.text = std::move(text);
    return reply;
}

AgentReply AgentReply::make_call(ActionCall call, std::string id) {
    AgentReply reply;
    reply.kind = ReplyKind::tool_call;
    reply.raw = json(call).dump();
    reply.call = std::move(call);
    reply.call_id = std::move(id);
    return reply;
}

AgentReply AgentReply::make_malformed(std::string raw, std::string error) {
    AgentReply reply;
    reply.kind = ReplyKind::malformed;
    reply.raw = std::move(raw);
    reply.error = std::move(error);
    return reply;
}

std::size_t instruction_index(const Conversation& conv) {
    for (std::size_t i = 0; i < conv.messages.size(); ++i) {
        if (conv.messages[i].tag == MessageTag::instruction)
            return i;
    }
    return 0;
}

json wire_messages(const Conversation& conv) {
    json out = json::array();
    for (const auto& message : conv.messages) {
        if (message.tag == MessageTag::malformed_reply)
            continue;
        json m{{"role", std::string{to_string(message.role)}}};
        if (message.tool_call) {
            m["content"] = message.content.empty() ? json(nullptr) : json(message.content);
            m["tool_calls"] = json::array({json{
                {"id", message.tool_call->id},
                {"type", "function"},
                {"function",
                 {{"name", std::string{to_string(action_name(message.tool_call->call))}},
                  {"arguments", action_arguments(message.tool_call->call).dump()}}},
            }});
        } else {
            m["content"] = message.content;
        }
        if (message.tool_call_id)
            m["tool_call_id"] = *message.tool_call_id;
        out.push_back(std::move(m));
    }
    return out;
}

json completion_request(const BackendConfig& config, const Conversation& conv, const ToolSchema& schema,
                        const ActionSet& allowed) {
    // Only temperature is set; every other sampling parameter keeps the server default.
    return json{
        {"model", config.model},
        {"temperature", config.temperature},
        {"messages", wire_messages(conv)},
        {"tools", schema.tools_json(allowed)},
    };
}

AgentReply parse_completion(const json& body, const ToolSchema& schema, const ActionSet& allowed) {
    if (!body.is_object() || !body.contains("choices") || !body["choices"].is_array() || body["choices"].empty() ||
        !body["choices"][0].contains("message") || !body["choices"][0]["message"].is_object())
        throw TransportError("response is not a chat completion: " + body.dump().substr(0, 200));

    const json& message = body["choices"][0]["message"];
    const std::string raw = message.dump();
    std::string content;
    if (message.contains("content") && message["content"].is_string())
        content = message["content"].get<std::string>();

    if (message.contains("tool_calls") && message["tool_calls"].is_array() && !message["tool_calls"].empty()) {
        const json& calls = message["tool_calls"];
        const json& first = calls[0];
        if (!first.contains("function") || !first["function"].is_object() || !first["function"].contains("name") ||
            !first["function"]["name"].is_string())
            return AgentReply::make_malformed(raw, "tool call without a function name");
        std::string name = first["function"]["name"].get<std::string>();
        std::string arguments = "{}";
        if (first["function"].contains("arguments")) {
            const json& a = first["function"]["arguments"];
            if (!a.is_string())
                return AgentReply::make_malformed(raw, "tool call arguments must be a JSON string");
            arguments = a.get<std::string>();
        }
        auto validated = schema.validate(name, arguments, allowed);
        if (auto* error = std::get_if<std::string>(&validated))
            return AgentReply::make_malformed(raw, *error);
        auto reply = AgentReply::make_call(std::get<ActionCall>(validated),
                                           first.contains("id") && first["id"].is_string() ? first["id"].get<std::string>()
                                                                                            : std::string{});
        reply.text = content;
        reply.raw = raw;
        reply.discarded_calls = static_cast<int>(calls.size()) - 1;
        return reply;
    }

    if (!message.contains("content") || !message["content"].is_string())
        return AgentReply::make_malformed(raw, "reply has neither text nor a tool call");
    auto reply = AgentReply::make_text(content);
    reply.raw = raw;
    return reply;
}

ChatCompletionsAgent::ChatCompletionsAgent(BackendConfig config) : config_(std::move(config)) {
    static const std::regex url{R"(^(https?://[^/]+)(/.*)?$)"};
    std::smatch match;
    if (!std::regex_match(config_.endpoint, match, url))
        throw ConfigError("backend '" + config_.name + "': malformed endpoint '" + config_.endpoint + "'");
    origin_ = match[1].str();
    base_path_ = match[2].str();
    while (!base_path_.empty() && base_path_.back() == '/')
        base_path_.pop_back();

    if (config_.model.empty())
        throw ConfigError("backend '" + config_.name + "': model identifier is required");
    if (config_.max_in_flight < 1 || config_.max_retries < 0 || config_.timeout_s <= 0)
        throw ConfigError("backend '" + config_.name + "': invalid limits");
    if (!config_.api_key_env.empty()) {
        const char* key = std::getenv(config_.api_key_env.c_str());
        if (key == nullptr || *key == '\0')
            throw ConfigError("backend '" + config_.name + "': environment variable " + config_.api_key_env +
                              " is not set");
        api_key_ = key;
    }
    in_flight_ = std::make_unique<std::counting_semaphore<>>(config_.max_in_flight);
}

AgentReply ChatCompletionsAgent::complete(const AgentRequest& request) {
    const std::string body = completion_request(config_, request.conversation, request.schema, request.allowed).dump();
    const std::string path = base_path_ + "/chat/completions";

    SemaphoreGuard guard{*in_flight_};
    httplib::Client client{origin_};
    auto timeout = std::chrono::duration_cast<std::chrono::microseconds>(std::chrono::duration<double>(config_.timeout_s));
    client.set_connection_timeout(timeout);
    client.set_read_timeout(timeout);
    client.set_write_timeout(timeout);
    httplib::Headers headers;
    if (!api_key_.empty())
        headers.emplace("Authorization", "Bearer " + api_key_);

    const auto start = Clock::now();
    std::string last_error;
    for (int attempt = 0; attempt <= config_.max_retries; ++attempt) {
        if (attempt > 0 && config_.retry_backoff_s > 0)
            std::this_thread::sleep_for(std::chrono::duration<double>(config_.retry_backoff_s * (1 << (attempt - 1))));

        auto response = client.Post(path, headers, body, "application/json");
        if (!response) {
            last_error = "transport failure: " + httplib::to_string(response.error());
            continue;
        }
        if (retryable(response->status)) {
            last_error = "HTTP " + std::to_string(response->status);
            continue;
        }
        if (response->status != 200)
            throw TransportError("backend '" + config_.name + "': HTTP " + std::to_string(response->status) + ": " +
                                 response->body.substr(0, 300));

        auto parsed = json::parse(response->body, nullptr, false);
        if (parsed.is_discarded())
            throw TransportError("backend '" + config_.name + "': response body is not JSON");
        auto reply = parse_completion(parsed, request.schema, request.allowed);
        reply.wait = Clock::now() - start;
        return reply;
    }
    throw TransportError("backend '" + config_.name + "': giving up after " + std::to_string(config_.max_retries + 1) +
                         " attempts (" + last_error + ")");
}

AgentReply OracleAgent::complete(const AgentRequest& request) {
    const auto plan = oracle_plan(request.instance);
    const auto& messages = request.conversation.messages;
    std::size_t done = 0;
    for (std::size_t i = instruction_index(request.conversation); i < messages.size(); ++i) {
        if (messages[i].role == Role::assistant && messages[i].tool_call)
            ++done;
    }
    if (done >= plan.size())
        throw std::logic_error("oracle asked for a step beyond its plan");
    const ActionCall& step = plan[done];

    if (request.expect == Expect::text_reply) {
        if (request.conversation.awaiting_plan)
            return AgentReply::make_text("Plan: execute the remaining " + std::to_string(plan.size() - done) +
                                         " function calls of the known solution.");
        return AgentReply::make_text("Next I will call " + std::string{to_string(action_name(step))} + ".");
    }
    if (!request.allowed.contains(action_name(step)))
        throw std::logic_error("oracle plan step " + std::string{to_string(action_name(step))} +
                               " is not among the allowed functions");
    return AgentReply::make_call(step);
}

ReplayAgent::ReplayAgent(std::vector<Message> recorded, std::string model)
    : recorded_(std::move(recorded)), model_(std::move(model)) {
    for (std::size_t i = 0; i < recorded_.size(); ++i) {
        if (recorded_[i].role == Role::assistant && recorded_[i].tag != MessageTag::example)
            assistant_turns_.push_back(i);
    }
}

void ReplayAgent::verify(const Conversation& conv) const {
    std::vector<std::size_t> recorded_tools;
    for (std::size_t i = 0; i < recorded_.size(); ++i) {
        if (recorded_[i].role == Role::tool && recorded_[i].tag != MessageTag::example)
            recorded_tools.push_back(i);
    }
    std::size_t k = 0;
    for (std::size_t i = instruction_index(conv); i < conv.messages.size(); ++i) {
        const auto& live = conv.messages[i];
        if (live.role != Role::tool)
            continue;
        if (k >= recorded_tools.size())
            throw ReplayMismatch(i, "replay mismatch at message " + std::to_string(i) +
                                        ": tool response not present in the recording: \"" + live.content + "\"");
        const auto& expected = recorded_[recorded_tools[k]];
        if (live.content != expected.content)
            throw ReplayMismatch(recorded_tools[k], "replay mismatch at message " + std::to_string(recorded_tools[k]) +
                                                        ": expected \"" + expected.content + "\", got \"" +
                                                        live.content + "\"");
        ++k;
    }
}

AgentReply ReplayAgent::complete(const AgentRequest& request) {
    verify(request.conversation);
    if (cursor_ >= assistant_turns_.size())
        throw ReplayExhausted("replay exhausted after " + std::to_string(cursor_) + " recorded turns");
    const Message& m = recorded_[assistant_turns_[cursor_++]];

    AgentReply reply;
    if (m.tag == MessageTag::malformed_reply) {
        reply = AgentReply::make_malformed(m.content, "recorded malformed reply");
    } else if (m.tool_call) {
        reply = AgentReply::make_call(m.tool_call->call, m.tool_call->id);
        reply.text = m.content;
    } else {
        reply = AgentReply::make_text(m.content);
    }
    if (m.turn)
        reply.discarded_calls = m.turn->discarded_calls;
    return reply;
}

void ReplayAgent::finish(const Conversation& conv) {
    verify(conv);
    std::size_t live_tools = 0;
    for (std::size_t i = instruction_index(conv); i < conv.messages.size(); ++i)
        live_tools += conv.messages[i].role == Role::tool ? 1 : 0;
    std::size_t recorded_tools = 0;
    for (const auto& m : recorded_)
        recorded_tools += (m.role == Role::tool && m.tag != MessageTag::example) ? 1 : 0;
    if (live_tools != recorded_tools || cursor_ != assistant_turns_.size())
        throw ReplayMismatch(conv.messages.size(), "replay ended after " + std::to_string(cursor_) + " of " +
                                                       std::to_string(assistant_turns_.size()) + " recorded turns");
}

} // namespace housebot
