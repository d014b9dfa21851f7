// SPDX-License-Identifier: Apache-2.0
#include "housebot/runner.hpp"

#include "housebot/errors.hpp"
#include "housebot/rng.hpp"

#include <atomic>
#include <exception>
#include <map>
#include <mutex>
#include <thread>

namespace housebot {

namespace {

constexpr std::array<std::string_view, 5> kReasonNames{
    "none", "malformed_call", "budget_exhausted_target_unmet", "exited_target_unmet", "infrastructure_error",
};

} // namespace

std::string_view to_string(FailureReason reason) { return kReasonNames[static_cast<std::size_t>(reason)]; }

std::optional<FailureReason> parse_failure_reason(std::string_view name) {
    for (std::size_t i = 0; i < kReasonNames.size(); ++i) {
        if (kReasonNames[i] == name)
            return static_cast<FailureReason>(i);
    }
    return std::nullopt;
}

EpisodeResult run_episode(const TaskInstance& instance, const TechniqueConfig& technique, Agent& agent,
                          const EpisodeOptions& options) {
    technique.validate();
    const ObjectCatalog& catalog = options.catalog ? *options.catalog : ObjectCatalog::builtin();
    const ToolSchema& schema = ToolSchema::standard();

    EpisodeResult result;
    result.instance = instance;
    result.technique = technique;
    result.model = agent.model();
    result.temperature = agent.temperature();

    WorldState world = instance.initial_world;
    world.calls_executed = 0;
    RobotKnowledge knowledge;
    knowledge.robot_location = world.robot_location;
    knowledge.carried = world.carried;
    Conversation conv = build_initial_context(instance, technique);

    auto finish = [&](bool target_met, FailureReason failure) {
        result.success = target_met;
        result.failure_reason = target_met ? FailureReason::none : failure;
    };

    try {
        while (true) {
            if (result.turns >= options.turn_limit) {
                finish(check_target(instance, world), FailureReason::budget_exhausted_target_unmet);
                break;
            }
            TurnPlan plan = next_turn(conv, knowledge, world, technique);
            AgentReply reply = agent.complete(AgentRequest{conv, instance, schema, plan.allowed, plan.expect});
            ++result.turns;
            result.agent_wait_s += reply.wait.count();
            TurnInfo info{plan.expect, plan.allowed, reply.wait.count(), reply.discarded_calls};

            // The harness enforces the restriction even if the agent ignored it.
            if (reply.kind == ReplyKind::tool_call && !plan.allowed.contains(action_name(*reply.call))) {
                reply = AgentReply::make_malformed(reply.raw, "function '" +
                                                                  std::string{to_string(action_name(*reply.call))} +
                                                                  "' is not available in this turn");
            }

            if (reply.kind == ReplyKind::malformed) {
                conv.messages.push_back(
                    Message{.role = Role::assistant, .content = reply.raw, .tag = MessageTag::malformed_reply, .turn = info});
                result.error = reply.error;
                finish(false, FailureReason::malformed_call);
                break;
            }
            if (reply.kind == ReplyKind::text) {
                record_text_reply(conv, std::move(reply.text), plan, info);
                continue;
            }

            const ActionCall call = *reply.call;
            std::string id = reply.call_id.empty() ? "call_" + std::to_string(world.calls_executed + 1) : reply.call_id;
            ActionResponse response = apply_action(world, call, catalog);
            knowledge.update(call, response);
            record_tool_exchange(conv, ToolCallRecord{std::move(id), call}, std::move(reply.text), response, info);
            result.calls_used = world.calls_executed;

            if (std::holds_alternative<Exit>(call)) {
                finish(check_target(instance, world), FailureReason::exited_target_unmet);
                break;
            }
            if (world.calls_executed >= options.call_budget) {
                finish(check_target(instance, world), FailureReason::budget_exhausted_target_unmet);
                break;
            }
        }
        agent.finish(conv);
    } catch (const TransportError& e) {
        result.success = false;
        result.failure_reason = FailureReason::infrastructure_error;
        result.error = e.what();
    }
    result.transcript = std::move(conv.messages);
    return result;
}

std::uint64_t derive_seed(std::uint64_t base_seed, TaskKind kind, int repetition) {
    std::uint64_t cell = (static_cast<std::uint64_t>(kind) << 32) | static_cast<std::uint32_t>(repetition);
    return splitmix64(splitmix64(base_seed) ^ splitmix64(cell));
}

std::vector<EpisodeResult> run_matrix(const MatrixSpec& spec, const ResultSink& sink) {
    if (spec.repetitions < 1)
        throw ConfigError("repetitions must be at least 1");
    if (spec.parallelism < 1)
        throw ConfigError("parallelism must be at least 1");
    for (const auto& technique : spec.techniques)
        technique.validate();
    const ObjectCatalog& catalog = spec.catalog ? *spec.catalog : ObjectCatalog::builtin();

    struct Cell {
        std::size_t backend;
        TaskKind kind;
        std::size_t technique;
        int repetition;
    };
    std::vector<Cell> cells;
    for (std::size_t b = 0; b < spec.backends.size(); ++b)
        for (auto kind : spec.kinds)
            for (std::size_t t = 0; t < spec.techniques.size(); ++t)
                for (int r = 0; r < spec.repetitions; ++r)
                    cells.push_back({b, kind, t, r});

    // Instances are generated once per (kind, repetition) and shared by every technique.
    std::map<std::pair<TaskKind, int>, TaskInstance> instances;
    for (auto kind : spec.kinds)
        for (int r = 0; r < spec.repetitions; ++r)
            instances.emplace(std::pair{kind, r},
                              generate_task(kind, derive_seed(spec.base_seed, kind, r), catalog, spec.generator));

    std::vector<EpisodeResult> results(cells.size());
    std::atomic<std::size_t> next{0};
    std::mutex sink_mutex;
    std::exception_ptr failure;
    EpisodeOptions options{.catalog = &catalog};

    auto worker = [&] {
        try {
            for (std::size_t i = next++; i < cells.size(); i = next++) {
                const Cell& cell = cells[i];
                results[i] = run_episode(instances.at({cell.kind, cell.repetition}), spec.techniques[cell.technique],
                                         *spec.backends[cell.backend].agent, options);
                results[i].backend = spec.backends[cell.backend].label;
                if (sink) {
                    std::lock_guard lock{sink_mutex};
                    sink(results[i]);
                }
            }
        } catch (...) {
            std::lock_guard lock{sink_mutex};
            if (!failure)
                failure = std::current_exception();
            next = cells.size();
        }
    };

    auto threads = std::min<std::size_t>(static_cast<std::size_t>(spec.parallelism), cells.size());
    if (threads <= 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (std::size_t i = 0; i < threads; ++i)
            pool.emplace_back(worker);
    }
    if (failure)
        std::rethrow_exception(failure);
    return results;
}

} // namespace housebot
