// SPDX-License-Identifier: Apache-2.0
#include "housebot/errors.hpp"
#include "housebot/json_io.hpp"
#include "housebot/runner.hpp"

#include <doctest.h>

#include <set>

using namespace housebot;

namespace {

TaskInstance fetch_task() {
    TaskInstance t;
    t.params = FetchParams{"cup", Room::kitchen};
    t.instruction = render_instruction(t.params, ObjectCatalog::builtin());
    t.initial_world.set_count(Room::kitchen, "cup", 1);
    return t;
}

ScriptedAgent driver() {
    return ScriptedAgent{[](const AgentRequest&) { return AgentReply::make_call(DriveTo{Room::study}); }};
}

} // namespace

TEST_CASE("an agent that never exits stops at the budget") {
    auto agent = driver();
    auto result = run_episode(fetch_task(), TechniqueConfig{}, agent);
    CHECK(result.calls_used == kCallBudget);
    CHECK_FALSE(result.success);
    CHECK(result.failure_reason == FailureReason::budget_exhausted_target_unmet);
}

TEST_CASE("a satisfied target still counts at the budget") {
    auto task = fetch_task();
    task.initial_world.set_count(Room::parlor, "cup", 0);
    int step = 0;
    ScriptedAgent agent{[&](const AgentRequest&) {
        static const std::vector<ActionCall> plan{DriveTo{Room::kitchen}, GraspObject{"cup"}, DriveTo{Room::parlor},
                                                  PlaceObject{"cup"}};
        if (step < static_cast<int>(plan.size()))
            return AgentReply::make_call(plan[static_cast<std::size_t>(step++)]);
        return AgentReply::make_call(FindObjects{{"cup"}});
    }};
    auto result = run_episode(task, TechniqueConfig{}, agent);
    CHECK(result.calls_used == kCallBudget);
    CHECK(result.success);
}

TEST_CASE("a malformed call ends the episode") {
    ScriptedAgent agent{[](const AgentRequest&) { return AgentReply::make_malformed("{bad", "invalid JSON"); }};
    auto result = run_episode(fetch_task(), TechniqueConfig{}, agent);
    CHECK_FALSE(result.success);
    CHECK(result.failure_reason == FailureReason::malformed_call);
    CHECK(result.calls_used == 0);
    CHECK(result.transcript.back().tag == MessageTag::malformed_reply);
    CHECK(result.transcript.back().content == "{bad");
}

TEST_CASE("a call outside the adaptive set is malformed") {
    ScriptedAgent agent{[](const AgentRequest&) { return AgentReply::make_call(PlaceObject{"cup"}); }};
    auto result = run_episode(fetch_task(), TechniqueConfig{.adaptive_functions = true}, agent);
    CHECK(result.failure_reason == FailureReason::malformed_call);
    // Without AF the same call is executed and simply fails.
    auto plain = run_episode(fetch_task(), TechniqueConfig{}, agent);
    CHECK(plain.failure_reason == FailureReason::budget_exhausted_target_unmet);
}

TEST_CASE("exit before the target is a failure") {
    ScriptedAgent agent{[](const AgentRequest&) { return AgentReply::make_call(Exit{}); }};
    auto result = run_episode(fetch_task(), TechniqueConfig{}, agent);
    CHECK(result.failure_reason == FailureReason::exited_target_unmet);
    CHECK(result.calls_used == 1);
}

TEST_CASE("endless text replies hit the turn limit") {
    ScriptedAgent agent{[](const AgentRequest&) { return AgentReply::make_text("hmm"); }};
    auto result = run_episode(fetch_task(), TechniqueConfig{}, agent);
    CHECK(result.turns == kTurnLimit);
    CHECK(result.failure_reason == FailureReason::budget_exhausted_target_unmet);
}

TEST_CASE("transport errors become infrastructure failures") {
    ScriptedAgent agent{[](const AgentRequest&) -> AgentReply { throw TransportError("down"); }};
    auto result = run_episode(fetch_task(), TechniqueConfig{}, agent);
    CHECK(result.failure_reason == FailureReason::infrastructure_error);
    CHECK(result.error == "down");
}

TEST_CASE("wait time accumulates") {
    ScriptedAgent agent{[](const AgentRequest&) {
        auto reply = AgentReply::make_call(Exit{});
        reply.wait = std::chrono::duration<double>(0.25);
        return reply;
    }};
    auto result = run_episode(fetch_task(), TechniqueConfig{}, agent);
    CHECK(result.agent_wait_s == doctest::Approx(0.25));
}

TEST_CASE("all techniques see the same instance for a (kind, repetition)") {
    MatrixSpec spec;
    spec.kinds = {kAllTaskKinds.begin(), kAllTaskKinds.end()};
    for (const auto& p : technique_presets())
        spec.techniques.push_back(p.config);
    spec.backends = {{"oracle", std::make_shared<OracleAgent>()}};
    spec.repetitions = 5;
    spec.base_seed = 11;
    auto results = run_matrix(spec);
    CHECK(results.size() == 4 * 9 * 5);
    std::map<std::pair<int, std::uint64_t>, std::set<std::string>> by_cell;
    std::set<std::uint64_t> seeds;
    for (const auto& r : results) {
        by_cell[{static_cast<int>(r.kind()), r.seed()}].insert(json(r.instance).dump());
        seeds.insert(r.seed());
    }
    CHECK(by_cell.size() == 4 * 5);
    for (const auto& [key, serializations] : by_cell)
        CHECK(serializations.size() == 1);
    CHECK(seeds.size() == 4 * 5);
}

TEST_CASE("parallel execution matches sequential execution") {
    MatrixSpec spec;
    spec.kinds = {TaskKind::equals, TaskKind::distribute};
    spec.techniques = {parse_technique("af_react_eip_std"), parse_technique("af_cot")};
    spec.backends = {{"oracle", std::make_shared<OracleAgent>()}};
    spec.repetitions = 6;
    auto sequential = run_matrix(spec);
    spec.parallelism = 4;
    int sunk = 0;
    auto parallel = run_matrix(spec, [&](const EpisodeResult&) { ++sunk; });
    CHECK(sunk == static_cast<int>(parallel.size()));
    REQUIRE(sequential.size() == parallel.size());
    for (std::size_t i = 0; i < parallel.size(); ++i) {
        CHECK(sequential[i].transcript == parallel[i].transcript);
        CHECK(sequential[i].seed() == parallel[i].seed());
    }
}

TEST_CASE("matrix rejects invalid settings and propagates agent bugs") {
    MatrixSpec spec;
    spec.kinds = {TaskKind::fetch};
    spec.techniques = {TechniqueConfig{}};
    spec.backends = {{"oracle", std::make_shared<OracleAgent>()}};
    spec.repetitions = 0;
    CHECK_THROWS_AS(run_matrix(spec), ConfigError);
    spec.repetitions = 1;
    spec.techniques = {TechniqueConfig{.cot = true, .react = true}};
    CHECK_THROWS_AS(run_matrix(spec), ConfigError);

    spec.techniques = {TechniqueConfig{}};
    spec.backends = {{"broken", std::make_shared<ScriptedAgent>(
                                    [](const AgentRequest&) -> AgentReply { throw std::logic_error("bug"); })}};
    CHECK_THROWS_AS(run_matrix(spec), std::logic_error);
}

TEST_CASE("derived seeds differ across kinds and repetitions") {
    std::set<std::uint64_t> seen;
    for (auto kind : kAllTaskKinds)
        for (int r = 0; r < 50; ++r)
            seen.insert(derive_seed(0, kind, r));
    CHECK(seen.size() == 200);
    CHECK(derive_seed(1, TaskKind::fetch, 0) != derive_seed(0, TaskKind::fetch, 0));
}
