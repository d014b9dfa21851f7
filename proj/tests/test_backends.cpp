// SPDX-License-Identifier: Apache-2.0
#include "housebot/backends.hpp"
#include "housebot/errors.hpp"
#include "housebot/json_io.hpp"
#include "housebot/runner.hpp"

#include "support/mock_server.hpp"

#include <doctest.h>

#include <atomic>
#include <cstdlib>

using namespace housebot;
using housebot::testing::MockChatServer;
using housebot::testing::MockResponse;

namespace {

TaskInstance fetch_task(const std::string& object = "sponge", Room room = Room::kitchen) {
    TaskInstance t;
    t.params = FetchParams{object, room};
    t.instruction = render_instruction(t.params, ObjectCatalog::builtin());
    t.initial_world.set_count(room, object, 2);
    return t;
}

BackendConfig local_config(const std::string& endpoint) {
    BackendConfig c;
    c.name = "mock";
    c.endpoint = endpoint;
    c.model = "mock-model";
    c.api_key_env = "";
    c.timeout_s = 5;
    c.max_retries = 2;
    c.retry_backoff_s = 0;
    return c;
}

json body_of(const std::string& text) { return json::parse(text); }

} // namespace

TEST_CASE("tool schema layout") {
    const auto& schema = ToolSchema::standard();
    auto tools = schema.tools_json(ActionSet::all());
    REQUIRE(tools.size() == 5);
    for (const auto& tool : tools) {
        CHECK(tool["type"] == "function");
        CHECK(tool["function"]["parameters"]["type"] == "object");
        CHECK(tool["function"]["parameters"]["additionalProperties"] == false);
    }
    CHECK(tools[0]["function"]["name"] == "drive_to_location");
    CHECK(tools[0]["function"]["parameters"]["properties"]["location"]["enum"] ==
          json::array({"study", "parlor", "kitchen", "bedroom"}));
    CHECK(tools[1]["function"]["parameters"]["properties"]["object_name_list"]["type"] == "array");
    CHECK(tools[4]["function"]["parameters"]["properties"].empty());

    ActionSet restricted = ActionSet::all();
    restricted.erase(ActionName::place_object);
    auto names = json::array();
    for (const auto& tool : schema.tools_json(restricted))
        names.push_back(tool["function"]["name"]);
    CHECK(names == json::array({"drive_to_location", "find_object", "grasp_object", "exit"}));
}

TEST_CASE("schema validation is strict") {
    const auto& s = ToolSchema::standard();
    auto all = ActionSet::all();
    CHECK(std::holds_alternative<ActionCall>(s.validate("drive_to_location", R"({"location":"kitchen"})", all)));
    CHECK(std::holds_alternative<ActionCall>(s.validate("exit", "{}", all)));
    CHECK(std::holds_alternative<ActionCall>(s.validate("find_object", R"({"object_name_list":["a","b"]})", all)));
    CHECK(std::holds_alternative<std::string>(s.validate("drive_to_location", R"({"location":"garage"})", all)));
    CHECK(std::holds_alternative<std::string>(s.validate("drive_to_location", R"({"room":"kitchen"})", all)));
    CHECK(std::holds_alternative<std::string>(
        s.validate("drive_to_location", R"({"location":"kitchen","speed":3})", all)));
    CHECK(std::holds_alternative<std::string>(s.validate("grasp_object", R"({"object_name":3})", all)));
    CHECK(std::holds_alternative<std::string>(s.validate("grasp_object", R"({"object_name":"cup")", all)));
    CHECK(std::holds_alternative<std::string>(s.validate("find_object", R"({"object_name_list":"cup"})", all)));
    CHECK(std::holds_alternative<std::string>(s.validate("fly", "{}", all)));
    ActionSet no_place = all;
    no_place.erase(ActionName::place_object);
    CHECK(std::holds_alternative<std::string>(s.validate("place_object", R"({"object_name":"cup"})", no_place)));
}

TEST_CASE("parse_completion classifies replies") {
    const auto& s = ToolSchema::standard();
    auto all = ActionSet::all();
    auto call = parse_completion(body_of(testing::tool_call_body("c1", "grasp_object", {{"object_name", "cup"}})), s, all);
    CHECK(call.kind == ReplyKind::tool_call);
    CHECK(call.call_id == "c1");
    CHECK(*call.call == ActionCall{GraspObject{"cup"}});

    auto text = parse_completion(body_of(testing::text_body("thinking")), s, all);
    CHECK(text.kind == ReplyKind::text);
    CHECK(text.text == "thinking");

    auto bad = parse_completion(body_of(testing::tool_call_body("c2", "grasp_object", {{"object", "cup"}})), s, all);
    CHECK(bad.kind == ReplyKind::malformed);
    CHECK_FALSE(bad.raw.empty());

    CHECK_THROWS_AS(parse_completion(json{{"error", "nope"}}, s, all), TransportError);

    json two = body_of(testing::tool_call_body("c1", "exit", json::object()));
    auto extra = two["choices"][0]["message"]["tool_calls"][0];
    two["choices"][0]["message"]["tool_calls"].push_back(extra);
    CHECK(parse_completion(two, s, all).discarded_calls == 1);
}

TEST_CASE("wire messages follow the tool-calling protocol") {
    Conversation conv;
    conv.messages.push_back({.role = Role::user, .content = "hi", .tag = MessageTag::instruction});
    conv.messages.push_back({.role = Role::assistant,
                             .tool_call = ToolCallRecord{"call_1", DriveTo{Room::study}}});
    conv.messages.push_back({.role = Role::tool, .content = "ok", .tool_call_id = "call_1"});
    conv.messages.push_back({.role = Role::assistant, .content = "garbage", .tag = MessageTag::malformed_reply});
    auto wire = wire_messages(conv);
    REQUIRE(wire.size() == 3);
    CHECK(wire[1]["content"].is_null());
    CHECK(wire[1]["tool_calls"][0]["function"]["arguments"] == R"({"location":"study"})");
    CHECK(wire[2]["tool_call_id"] == "call_1");
    CHECK_FALSE(wire[0].contains("tag"));
}

TEST_CASE("remote agent runs a Fetch episode against a local endpoint") {
    MockChatServer server{testing::fetch_solver};
    ChatCompletionsAgent agent{local_config(server.endpoint())};
    auto task = fetch_task("cereal box", Room::study);
    auto result = run_episode(task, parse_technique("af_eip"), agent);
    CHECK(result.success);
    CHECK(result.calls_used == 6);
    CHECK(result.model == "mock-model");

    auto requests = server.requests();
    REQUIRE(requests.size() == 6);
    for (const auto& r : requests) {
        CHECK(r["model"] == "mock-model");
        CHECK(r["temperature"] == 0.0);
        CHECK(r["tools"].is_array());
    }
    // Adaptive functions: nothing carried at the start, so no place_object.
    for (const auto& tool : requests[0]["tools"])
        CHECK(tool["function"]["name"] != "place_object");
    CHECK(server.authorization_headers().front().empty());
}

TEST_CASE("api key is read from the named variable") {
    MockChatServer server{testing::fetch_solver};
    auto config = local_config(server.endpoint());
    config.api_key_env = "HOUSEBOT_TEST_KEY_UNSET_12345";
    CHECK_THROWS_AS(ChatCompletionsAgent{config}, ConfigError);
    ::setenv("HOUSEBOT_TEST_KEY", "sk-test", 1);
    config.api_key_env = "HOUSEBOT_TEST_KEY";
    ChatCompletionsAgent agent{config};
    run_episode(fetch_task(), TechniqueConfig{.adaptive_functions = true}, agent);
    CHECK(server.authorization_headers().front() == "Bearer sk-test");
}

TEST_CASE("transient errors are retried, permanent ones are infrastructure failures") {
    std::atomic<int> calls{0};
    MockChatServer flaky{[&](const json& request) -> MockResponse {
        if (calls++ % 2 == 0)
            return {503, "{}"};
        return testing::fetch_solver(request);
    }};
    ChatCompletionsAgent agent{local_config(flaky.endpoint())};
    auto ok = run_episode(fetch_task(), TechniqueConfig{}, agent);
    CHECK(ok.success);

    MockChatServer down{[](const json&) { return MockResponse{401, R"({"error":"bad key"})"}; }};
    ChatCompletionsAgent failing{local_config(down.endpoint())};
    auto result = run_episode(fetch_task(), TechniqueConfig{}, failing);
    CHECK_FALSE(result.success);
    CHECK(result.failure_reason == FailureReason::infrastructure_error);
    CHECK(result.error.find("401") != std::string::npos);
    CHECK(down.requests().size() == 1);
}

TEST_CASE("unreachable endpoint is an infrastructure failure") {
    auto config = local_config("http://127.0.0.1:1/v1");
    config.max_retries = 0;
    ChatCompletionsAgent agent{config};
    auto result = run_episode(fetch_task(), TechniqueConfig{}, agent);
    CHECK(result.failure_reason == FailureReason::infrastructure_error);
}

TEST_CASE("malformed endpoint and missing model are configuration errors") {
    auto config = local_config("ftp://example");
    CHECK_THROWS_AS(ChatCompletionsAgent{config}, ConfigError);
    config = local_config("http://127.0.0.1:9/v1");
    config.model.clear();
    CHECK_THROWS_AS(ChatCompletionsAgent{config}, ConfigError);
}

TEST_CASE("oracle agent solves generated tasks") {
    OracleAgent oracle;
    for (auto kind : kAllTaskKinds) {
        auto task = generate_task(kind, 3, ObjectCatalog::builtin());
        auto result = run_episode(task, TechniqueConfig{}, oracle);
        CHECK(result.success);
        CHECK(result.calls_used == static_cast<int>(oracle_plan(task).size()));
    }
}

TEST_CASE("replay agent detects divergence") {
    OracleAgent oracle;
    auto task = fetch_task();
    auto recorded = run_episode(task, TechniqueConfig{.adaptive_functions = true}, oracle);
    ReplayAgent same{recorded.transcript};
    CHECK(run_episode(task, TechniqueConfig{.adaptive_functions = true}, same).success);

    auto altered = task;
    altered.initial_world.set_count(Room::kitchen, "sponge", 5);
    ReplayAgent diverging{recorded.transcript};
    CHECK_THROWS_AS(run_episode(altered, TechniqueConfig{.adaptive_functions = true}, diverging), ReplayMismatch);
}
