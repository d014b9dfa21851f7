// SPDX-License-Identifier: Apache-2.0
#include "housebot/validation.hpp"

#include "housebot/errors.hpp"
#include "housebot/resources.hpp"
#include "housebot/rng.hpp"
#include "housebot/transcript.hpp"

#include <map>
#include <set>
#include <sstream>

namespace housebot {

namespace {

CheckResult pass(std::string name, std::string detail = {}) { return {std::move(name), true, std::move(detail)}; }
CheckResult fail(std::string name, std::string detail) { return {std::move(name), false, std::move(detail)}; }

WorldState random_world(Rng& rng, const std::vector<std::string>& names) {
    WorldState world;
    for (auto room : kAllRooms) {
        int n = rng.uniform(0, 5);
        for (int i = 0; i < n; ++i)
            world.set_count(room, rng.pick(names), rng.uniform(0, 3));
    }
    int carried = rng.uniform(0, static_cast<int>(kCarryCapacity));
    for (int i = 0; i < carried; ++i)
        world.carried.push_back(rng.pick(names));
    world.robot_location = kAllRooms[static_cast<std::size_t>(rng.uniform(0, 3))];
    return world;
}

ActionCall random_call(Rng& rng, const std::vector<std::string>& names, const WorldState& world) {
    auto name = [&] {
        // Mostly catalog names, sometimes something the world has never heard of.
        return rng.uniform(0, 9) == 0 ? std::string{"unicorn"} : rng.pick(names);
    };
    switch (rng.uniform(0, 4)) {
    case 0:
        return DriveTo{kAllRooms[static_cast<std::size_t>(rng.uniform(0, 3))]};
    case 1: {
        FindObjects find;
        int n = rng.uniform(0, 3);
        for (int i = 0; i < n; ++i)
            find.object_names.push_back(name());
        return find;
    }
    case 2: {
        // Bias grasps toward objects that are actually here.
        const auto& here = world.contents(world.robot_location);
        if (!here.empty() && rng.coin()) {
            auto it = here.begin();
            std::advance(it, rng.uniform(0, static_cast<int>(here.size()) - 1));
            return GraspObject{it->first};
        }
        return GraspObject{name()};
    }
    case 3:
        if (!world.carried.empty() && rng.coin())
            return PlaceObject{rng.pick(world.carried)};
        return PlaceObject{name()};
    default:
        return Exit{};
    }
}

std::string describe(const ActionCall& call) { return json(call).dump(); }

} // namespace

CheckResult check_world_properties(int sequences, std::uint64_t seed, const ObjectCatalog& catalog,
                                   const ActionExecutor& executor) {
    const std::string name = "world properties (" + std::to_string(sequences) + " random sequences)";
    ActionExecutor execute = executor ? executor : ActionExecutor{[&](WorldState& w, const ActionCall& c) {
        return apply_action(w, c, catalog);
    }};
    std::vector<std::string> names;
    for (const auto& entry : catalog.entries())
        names.push_back(entry.name);
    if (names.empty())
        return fail(name, "catalog is empty");
    auto tracked = names;
    tracked.push_back("unicorn");

    Rng rng{seed};
    for (int s = 0; s < sequences; ++s) {
        WorldState world = random_world(rng, names);
        int length = rng.uniform(1, 30);
        for (int step = 0; step < length; ++step) {
            const WorldState before = world;
            const ActionCall call = random_call(rng, names, world);
            const ActionSet available = available_actions(before);
            ActionResponse response = execute(world, call);
            auto where = "sequence " + std::to_string(s) + " step " + std::to_string(step) + " " + describe(call);

            if (world.carried.size() > kCarryCapacity)
                return fail(name, "carry limit exceeded at " + where);
            if (world.calls_executed != before.calls_executed + 1)
                return fail(name, "call counter did not advance by one at " + where);
            for (const auto& object : tracked) {
                if (world.total(object) != before.total(object))
                    return fail(name, "total of '" + object + "' changed at " + where);
            }
            for (auto room : kAllRooms) {
                for (const auto& [object, count] : world.contents(room)) {
                    if (count < 0)
                        return fail(name, "negative count at " + where);
                }
            }
            if (response.text.empty())
                return fail(name, "empty response text at " + where);
            if (!response.ok && (world.placements != before.placements || world.carried != before.carried ||
                                 world.robot_location != before.robot_location))
                return fail(name, "failed call changed the world at " + where);
            if (!available.contains(action_name(call)) && response.ok)
                return fail(name, "excluded function succeeded at " + where);
            if (std::holds_alternative<Exit>(call))
                break;
        }
    }
    return pass(name);
}

std::optional<std::string> technique_structure_violation(const EpisodeResult& result, const ObjectCatalog& catalog) {
    const auto& messages = result.transcript;
    const auto& technique = result.technique;
    std::size_t start = 0;
    for (std::size_t i = 0; i < messages.size(); ++i) {
        if (messages[i].tag == MessageTag::instruction) {
            start = i;
            break;
        }
    }

    WorldState world = result.instance.initial_world;
    RobotKnowledge knowledge;
    int calls = 0;
    int reason_prompts = 0;
    int text_replies = 0;
    int state_descriptions = 0;
    std::size_t state_index = 0;
    std::set<int> plan_points;
    std::optional<RobotKnowledge> knowledge_at_state;

    for (std::size_t i = 0; i < start; ++i) {
        if (messages[i].tag == MessageTag::state_description)
            return "state description before the instruction";
    }
    for (std::size_t i = start; i < messages.size(); ++i) {
        const Message& m = messages[i];
        switch (m.tag) {
        case MessageTag::plan_prompt:
            if (!technique.cot)
                return "plan prompt without CoT at message " + std::to_string(i);
            if (calls % kReplanInterval != 0 || !plan_points.insert(calls).second)
                return "plan prompt after " + std::to_string(calls) + " calls";
            break;
        case MessageTag::reason_prompt:
            if (!technique.react)
                return "reasoning prompt without ReAct at message " + std::to_string(i);
            ++reason_prompts;
            break;
        case MessageTag::state_description:
            ++state_descriptions;
            state_index = i;
            knowledge_at_state = knowledge;
            break;
        default:
            break;
        }
        if (m.role != Role::assistant || m.tag == MessageTag::malformed_reply)
            continue;

        if (!m.turn)
            return "assistant message " + std::to_string(i) + " lacks turn information";
        ActionSet expected = technique.adaptive_functions ? available_actions(world) : ActionSet::all();
        if (m.turn->allowed != expected)
            return "allowed functions " + to_string(m.turn->allowed) + " differ from " + to_string(expected) +
                   " at message " + std::to_string(i);
        if (!m.tool_call) {
            ++text_replies;
            continue;
        }
        ActionResponse response = apply_action(world, m.tool_call->call, catalog);
        knowledge.update(m.tool_call->call, response);
        ++calls;
        if (i + 1 >= messages.size() || messages[i + 1].role != Role::tool ||
            messages[i + 1].content != response.text)
            return "tool response after message " + std::to_string(i) + " does not match the simulator";
    }

    if (calls != result.calls_used)
        return "transcript holds " + std::to_string(calls) + " calls, result says " + std::to_string(result.calls_used);
    if (calls > kCallBudget)
        return "more than " + std::to_string(kCallBudget) + " calls";
    if (technique.cot) {
        for (int point = 0; point < calls && point <= 2 * kReplanInterval; point += kReplanInterval) {
            if (!plan_points.contains(point))
                return "missing plan prompt at " + std::to_string(point) + " calls";
        }
    }
    if (technique.react && result.failure_reason != FailureReason::malformed_call &&
        (reason_prompts != calls || text_replies != calls))
        return "ReAct: " + std::to_string(reason_prompts) + " reasoning prompts and " + std::to_string(text_replies) +
               " reasoning replies for " + std::to_string(calls) + " calls";
    if (state_descriptions > 1)
        return "more than one state description in context";
    if (technique.state_description) {
        if (result.turns > 0 && state_descriptions != 1)
            return "state description missing";
        // The description must be the last message before the final reply.
        if (state_descriptions == 1) {
            std::size_t last_assistant = messages.size();
            for (std::size_t i = messages.size(); i-- > 0;) {
                if (messages[i].role == Role::assistant) {
                    last_assistant = i;
                    break;
                }
            }
            if (state_index + 1 != last_assistant)
                return "state description is not the final context message";
            if (messages[state_index].content != render_state_description(*knowledge_at_state))
                return "state description does not match the robot's knowledge";
        }
    } else if (state_descriptions != 0) {
        return "state description without StD";
    }
    return std::nullopt;
}

CheckResult check_oracle_matrix(int repetitions, std::uint64_t base_seed, const ObjectCatalog& catalog,
                                int parallelism) {
    const std::string name = "oracle matrix (4 tasks x 9 presets x " + std::to_string(repetitions) + " seeds)";
    MatrixSpec spec;
    spec.kinds = {kAllTaskKinds.begin(), kAllTaskKinds.end()};
    for (const auto& preset : technique_presets())
        spec.techniques.push_back(preset.config);
    spec.backends = {{"oracle", std::make_shared<OracleAgent>()}};
    spec.repetitions = repetitions;
    spec.base_seed = base_seed;
    spec.parallelism = parallelism;
    spec.catalog = &catalog;

    for (const auto& result : run_matrix(spec)) {
        auto where = std::string{to_string(result.kind())} + " / " + result.technique.label() + " / seed " +
                     std::to_string(result.seed());
        if (!result.success)
            return fail(name, "failed (" + std::string{to_string(result.failure_reason)} + ") at " + where);
        if (result.calls_used > kCallBudget)
            return fail(name, "over budget at " + where);
        if (auto violation = technique_structure_violation(result, catalog))
            return fail(name, *violation + " at " + where);
    }
    return pass(name);
}

CheckResult check_fetch_fixture_replay(std::string_view jsonl) {
    const std::string name = "Fetch transcript fixture replay";
    try {
        auto recorded = parse_transcript_jsonl(jsonl);
        ReplayAgent agent{recorded.result.transcript, recorded.result.model};
        auto live = run_episode(recorded.result.instance, recorded.result.technique, agent);
        if (!live.success)
            return fail(name, "episode failed: " + std::string{to_string(live.failure_reason)});
        if (live.calls_used != recorded.result.calls_used)
            return fail(name, "executed " + std::to_string(live.calls_used) + " calls, recording has " +
                                  std::to_string(recorded.result.calls_used));
        if (live.transcript != recorded.result.transcript)
            return fail(name, "live transcript differs from the recording");
        return pass(name, std::to_string(live.calls_used) + " calls");
    } catch (const ReplayMismatch& e) {
        return fail(name, e.what());
    } catch (const std::exception& e) {
        return fail(name, e.what());
    }
}

CheckResult check_worked_example(const WorkedExample& example, const ObjectCatalog& catalog) {
    const std::string name = "worked example replay";
    WorldState world = example.world;
    const auto& messages = example.messages;
    for (std::size_t i = 0; i < messages.size(); ++i) {
        if (!messages[i].tool_call)
            continue;
        auto response = apply_action(world, messages[i].tool_call->call, catalog);
        if (i + 1 >= messages.size() || messages[i + 1].role != Role::tool ||
            messages[i + 1].tool_call_id != messages[i].tool_call->id)
            return fail(name, "call at message " + std::to_string(i) + " has no matching tool response");
        if (messages[i + 1].content != response.text)
            return fail(name, "message " + std::to_string(i + 1) + ": recorded \"" + messages[i + 1].content +
                                  "\", simulator says \"" + response.text + "\"");
    }
    if (messages.empty() || !messages[messages.size() - 2].tool_call ||
        !std::holds_alternative<Exit>(messages[messages.size() - 2].tool_call->call))
        return fail(name, "example does not end with exit");

    TaskInstance task;
    task.params = EqualsParams{"apple", "sponge", Room::bedroom};
    task.initial_world = example.world;
    if (render_instruction(task.params, catalog) != example.instruction)
        return fail(name, "instruction is not an Equals task over apples and sponges in the bedroom");
    if (!check_target(task, world))
        return fail(name, "example does not reach the Equals target");
    return pass(name);
}

std::vector<CheckResult> run_validation(const ValidationOptions& options) {
    const ObjectCatalog& catalog = options.catalog ? *options.catalog : ObjectCatalog::builtin();
    std::vector<CheckResult> results;
    results.push_back(check_oracle_matrix(options.repetitions, options.base_seed, catalog, options.parallelism));
    results.push_back(check_fetch_fixture_replay(resources::fetch_golden_jsonl()));
    results.push_back(check_worked_example(builtin_worked_example(), catalog));
    results.push_back(check_world_properties(options.fuzz_sequences, options.base_seed, catalog));
    return results;
}

} // namespace housebot
