// SPDX-License-Identifier: Apache-2.0
#include "support/mock_server.hpp"

#include <httplib.h>

#include <regex>

namespace housebot::testing {

using nlohmann::json;

MockChatServer::MockChatServer(Handler handler)
    : server_(std::make_unique<httplib::Server>()), handler_(std::move(handler)) {
    server_->Post("/v1/chat/completions", [this](const httplib::Request& req, httplib::Response& res) {
        json body = json::parse(req.body, nullptr, false);
        {
            std::lock_guard lock{mutex_};
            requests_.push_back(body);
            auth_.push_back(req.get_header_value("Authorization"));
        }
        MockResponse reply = handler_(body);
        res.status = reply.status;
        res.set_content(reply.body, "application/json");
    });
    port_ = server_->bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_->listen_after_bind(); });
    server_->wait_until_ready();
}

MockChatServer::~MockChatServer() {
    server_->stop();
    if (thread_.joinable())
        thread_.join();
}

std::string MockChatServer::endpoint() const { return "http://127.0.0.1:" + std::to_string(port_) + "/v1"; }

std::vector<json> MockChatServer::requests() const {
    std::lock_guard lock{mutex_};
    return requests_;
}

std::vector<std::string> MockChatServer::authorization_headers() const {
    std::lock_guard lock{mutex_};
    return auth_;
}

std::string tool_call_body(const std::string& id, const std::string& name, const json& arguments) {
    json call = {{"id", id}, {"type", "function"}, {"function", {{"name", name}, {"arguments", arguments.dump()}}}};
    json message = {{"role", "assistant"}, {"content", nullptr}, {"tool_calls", json::array({call})}};
    return json{{"id", "chatcmpl-mock"},
                {"object", "chat.completion"},
                {"choices", json::array({{{"index", 0}, {"message", message}, {"finish_reason", "tool_calls"}}})}}
        .dump();
}

std::string text_body(const std::string& text) {
    json message = {{"role", "assistant"}, {"content", text}};
    return json{{"id", "chatcmpl-mock"},
                {"object", "chat.completion"},
                {"choices", json::array({{{"index", 0}, {"message", message}, {"finish_reason", "stop"}}})}}
        .dump();
}

MockResponse fetch_solver(const json& request) {
    const auto& messages = request.at("messages");
    std::size_t instruction = 0;
    for (std::size_t i = 0; i < messages.size(); ++i) {
        if (messages[i].at("role") == "user")
            instruction = i;
    }
    static const std::regex pattern{R"(Please get me an? (.+) from the (\w+)\.)"};
    std::smatch match;
    const std::string text = messages[instruction].at("content").get<std::string>();
    if (!std::regex_match(text, match, pattern))
        return {400, R"({"error":{"message":"mock model only understands Fetch"}})"};
    const std::string object = match[1].str();
    const std::string room = match[2].str();

    std::size_t step = 0;
    for (std::size_t i = instruction + 1; i < messages.size(); ++i) {
        if (messages[i].at("role") == "assistant" && messages[i].contains("tool_calls"))
            ++step;
    }
    const std::vector<std::pair<std::string, json>> plan{
        {"drive_to_location", {{"location", room}}},
        {"find_object", {{"object_name_list", json::array({object})}}},
        {"grasp_object", {{"object_name", object}}},
        {"drive_to_location", {{"location", "parlor"}}},
        {"place_object", {{"object_name", object}}},
        {"exit", json::object()},
    };
    if (step >= plan.size())
        return {200, text_body("I am done.")};
    return {200, tool_call_body("call_mock_" + std::to_string(step + 1), plan[step].first, plan[step].second)};
}

} // namespace housebot::testing
