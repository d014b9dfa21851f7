// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "housebot/catalog.hpp"
#include "housebot/world.hpp"

#include <array>
#include <cstdint>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace housebot {

enum class TaskKind : std::uint8_t { fetch, conditional, equals, distribute };

inline constexpr std::array<TaskKind, 4> kAllTaskKinds{
    TaskKind::fetch, TaskKind::conditional, TaskKind::equals, TaskKind::distribute,
};

/// "Fetch", "Conditional", "Equals", "Distribute".
std::string_view to_string(TaskKind kind);

/// Case-insensitive. Throws ConfigError for unknown names.
TaskKind parse_task_kind(std::string_view name);

struct FetchParams {
    std::string object;
    Room room = Room::study;
    bool operator==(const FetchParams&) const = default;
};

struct ConditionalParams {
    std::string probe_object;
    Room probe_room = Room::study;
    std::string then_object;
    Room then_room = Room::study;
    std::string else_object;
    Room else_room = Room::study;
    bool operator==(const ConditionalParams&) const = default;
};

struct EqualsParams {
    std::string counted_object;
    std::string moved_object;
    Room room = Room::study;
    bool operator==(const EqualsParams&) const = default;
};

struct DistributeParams {
    std::string object;
    Room start_room = Room::study;
    bool operator==(const DistributeParams&) const = default;
};

using TaskParams = std::variant<FetchParams, ConditionalParams, EqualsParams, DistributeParams>;

struct TaskInstance {
    std::uint64_t seed = 0;
    std::string instruction;
    TaskParams params;
    WorldState initial_world;

    TaskKind kind() const { return static_cast<TaskKind>(params.index()); }

    bool operator==(const TaskInstance&) const = default;
};

/// Distractor density. Each room receives between `min_distractors` and
/// `max_distractors` catalog objects unrelated to the task, each with a
/// count in [min_count, max_count].
struct GeneratorOptions {
    int min_distractors = 2;
    int max_distractors = 4;
    int min_count = 1;
    int max_count = 3;

    bool operator==(const GeneratorOptions&) const = default;
};

/// Seeded, deterministic instance generation.
///
/// Guarantees: the robot starts in the parlor; Fetch and Conditional targets
/// are absent from the parlor; Equals has 1-3 counted objects and at least as
/// many movable ones in a non-parlor room; Distribute starts with 4-6
/// instances in one room and none elsewhere. Task objects never appear as
/// distractors.
TaskInstance generate_task(TaskKind kind, std::uint64_t seed, const ObjectCatalog& catalog,
                           const GeneratorOptions& options = {});

/// Default-constructed parameters of the given kind.
TaskParams default_params(TaskKind kind);

/// Renders the user instruction for the given parameters.
std::string render_instruction(const TaskParams& params, const ObjectCatalog& catalog);

/// Whether `final_world` satisfies the target condition of `instance`.
bool check_target(const TaskInstance& instance, const WorldState& final_world);

/// A solution computed with full knowledge of the initial world. Ends with
/// exit, never exceeds the carry capacity and fits in the call budget.
std::vector<ActionCall> oracle_plan(const TaskInstance& instance);

} // namespace housebot
