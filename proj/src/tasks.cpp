// SPDX-License-Identifier: Apache-2.0
#include "housebot/tasks.hpp"

#include "housebot/errors.hpp"
#include "housebot/rng.hpp"

#include <algorithm>
#include <cctype>

namespace housebot {

namespace {

constexpr std::array<std::string_view, 4> kKindNames{"Fetch", "Conditional", "Equals", "Distribute"};

// The worked example shipped for example-in-prompt prompting uses this
// combination; generated Equals tasks must differ from it.
constexpr Room kExampleRoom = Room::bedroom;
constexpr std::string_view kExampleCounted = "apple";
constexpr std::string_view kExampleMoved = "sponge";

const std::vector<Room> kRemoteRooms{Room::study, Room::kitchen, Room::bedroom};

std::string room_name(Room room) { return std::string{to_string(room)}; }

std::vector<std::string> catalog_names(const ObjectCatalog& catalog) {
    std::vector<std::string> names;
    names.reserve(catalog.size());
    for (const auto& entry : catalog.entries())
        names.push_back(entry.name);
    return names;
}

/// Draws `n` distinct names from the catalog, in draw order.
std::vector<std::string> draw_distinct(Rng& rng, const ObjectCatalog& catalog, std::size_t n) {
    auto names = catalog_names(catalog);
    if (names.size() < n)
        throw ConfigError("catalog has " + std::to_string(names.size()) + " objects, task needs " + std::to_string(n));
    rng.shuffle(names);
    names.resize(n);
    return names;
}

void place_distractors(Rng& rng, WorldState& world, const ObjectCatalog& catalog,
                       const std::vector<std::string>& task_objects, const GeneratorOptions& options) {
    std::vector<std::string> pool;
    for (const auto& name : catalog_names(catalog)) {
        if (std::find(task_objects.begin(), task_objects.end(), name) == task_objects.end())
            pool.push_back(name);
    }
    for (auto room : kAllRooms) {
        auto candidates = pool;
        rng.shuffle(candidates);
        auto wanted = static_cast<std::size_t>(rng.uniform(options.min_distractors, options.max_distractors));
        candidates.resize(std::min(wanted, candidates.size()));
        for (const auto& name : candidates)
            world.set_count(room, name, rng.uniform(options.min_count, options.max_count));
    }
}

void validate(const GeneratorOptions& options) {
    if (options.min_distractors < 0 || options.min_distractors > options.max_distractors)
        throw ConfigError("generator: invalid distractor range");
    if (options.min_count < 1 || options.min_count > options.max_count)
        throw ConfigError("generator: invalid distractor count range");
}

} // namespace

std::string_view to_string(TaskKind kind) { return kKindNames[static_cast<std::size_t>(kind)]; }

TaskKind parse_task_kind(std::string_view name) {
    std::string lower;
    for (char c : name)
        lower += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    for (auto kind : kAllTaskKinds) {
        std::string candidate;
        for (char c : to_string(kind))
            candidate += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
        if (candidate == lower)
            return kind;
    }
    throw ConfigError("unknown task kind '" + std::string{name} + "'");
}

std::string render_instruction(const TaskParams& params, const ObjectCatalog& catalog) {
    if (const auto* p = std::get_if<FetchParams>(&params))
        return "Please get me " + with_article(p->object) + " from the " + room_name(p->room) + ".";
    if (const auto* p = std::get_if<ConditionalParams>(&params))
        return "Check if there is " + with_article(p->probe_object) + " in the " + room_name(p->probe_room) +
               ". If you find one, bring me " + with_article(p->then_object) + " from the " + room_name(p->then_room) +
               ". If not, bring me " + with_article(p->else_object) + " from the " + room_name(p->else_room) + ".";
    if (const auto* p = std::get_if<EqualsParams>(&params)) {
        auto room = room_name(p->room);
        return "For every " + p->counted_object + " in the " + room + ", move " + with_article(p->moved_object) +
               " from the " + room + " to the parlor.";
    }
    const auto& p = std::get<DistributeParams>(params);
    auto plural = catalog.plural(p.object);
    return "Please distribute the " + plural + " evenly so that each location contains at least one " + p.object +
           ". You can start with the " + plural + " in the " + room_name(p.start_room) + ".";
}

TaskInstance generate_task(TaskKind kind, std::uint64_t seed, const ObjectCatalog& catalog,
                           const GeneratorOptions& options) {
    if (catalog.empty())
        throw ConfigError("generate_task: empty catalog");
    validate(options);

    Rng rng{splitmix64(seed ^ splitmix64(static_cast<std::uint64_t>(kind) + 1))};
    TaskInstance instance;
    instance.seed = seed;
    WorldState& world = instance.initial_world;
    std::vector<std::string> task_objects;

    switch (kind) {
    case TaskKind::fetch: {
        FetchParams p{draw_distinct(rng, catalog, 1)[0], rng.pick(kRemoteRooms)};
        world.set_count(p.room, p.object, rng.uniform(1, 3));
        task_objects = {p.object};
        instance.params = p;
        break;
    }
    case TaskKind::conditional: {
        auto objects = draw_distinct(rng, catalog, 3);
        auto rooms = kRemoteRooms;
        rng.shuffle(rooms);
        ConditionalParams p{objects[0], rooms[0], objects[1], rooms[1], objects[2], rooms[2]};
        bool present = rng.coin();
        if (present)
            world.set_count(p.probe_room, p.probe_object, rng.uniform(1, 3));
        world.set_count(p.then_room, p.then_object, rng.uniform(1, 3));
        world.set_count(p.else_room, p.else_object, rng.uniform(1, 3));
        task_objects = objects;
        instance.params = p;
        break;
    }
    case TaskKind::equals: {
        if (catalog.size() < 2)
            throw ConfigError("catalog has too few objects for an Equals task");
        Room room = rng.pick(kRemoteRooms);
        auto counted = draw_distinct(rng, catalog, 1)[0];
        std::vector<std::string> movable;
        for (const auto& name : catalog_names(catalog)) {
            bool is_example = room == kExampleRoom && counted == kExampleCounted && name == kExampleMoved;
            if (name != counted && !is_example)
                movable.push_back(name);
        }
        if (movable.empty())
            throw ConfigError("catalog has too few objects for an Equals task");
        EqualsParams p{counted, rng.pick(movable), room};
        int n = rng.uniform(1, 3);
        world.set_count(room, p.counted_object, n);
        world.set_count(room, p.moved_object, n + rng.uniform(0, 2));
        task_objects = {p.counted_object, p.moved_object};
        instance.params = p;
        break;
    }
    case TaskKind::distribute: {
        DistributeParams p{draw_distinct(rng, catalog, 1)[0], rng.pick(std::vector<Room>{kAllRooms.begin(), kAllRooms.end()})};
        world.set_count(p.start_room, p.object, rng.uniform(4, 6));
        task_objects = {p.object};
        instance.params = p;
        break;
    }
    default:
        throw ConfigError("unknown task kind");
    }

    place_distractors(rng, world, catalog, task_objects, options);
    instance.instruction = render_instruction(instance.params, catalog);
    return instance;
}

bool check_target(const TaskInstance& instance, const WorldState& final_world) {
    const WorldState& initial = instance.initial_world;
    if (const auto* p = std::get_if<FetchParams>(&instance.params))
        return final_world.count(Room::parlor, p->object) >= 1;
    if (const auto* p = std::get_if<ConditionalParams>(&instance.params)) {
        bool present = initial.count(p->probe_room, p->probe_object) >= 1;
        const auto& required = present ? p->then_object : p->else_object;
        return final_world.count(Room::parlor, required) >= 1;
    }
    if (const auto* p = std::get_if<EqualsParams>(&instance.params)) {
        int wanted = initial.count(p->room, p->counted_object);
        int delivered = final_world.count(Room::parlor, p->moved_object) - initial.count(Room::parlor, p->moved_object);
        int removed = initial.count(p->room, p->moved_object) - final_world.count(p->room, p->moved_object);
        return delivered == wanted && removed == wanted;
    }
    const auto& p = std::get<DistributeParams>(instance.params);
    return std::all_of(kAllRooms.begin(), kAllRooms.end(),
                       [&](Room room) { return final_world.count(room, p.object) >= 1; });
}

std::vector<ActionCall> oracle_plan(const TaskInstance& instance) {
    const WorldState& world = instance.initial_world;
    std::vector<ActionCall> plan;

    auto fetch = [&](const std::string& object, Room room) {
        plan.emplace_back(DriveTo{room});
        plan.emplace_back(FindObjects{{object}});
        plan.emplace_back(GraspObject{object});
        plan.emplace_back(DriveTo{Room::parlor});
        plan.emplace_back(PlaceObject{object});
    };

    if (const auto* p = std::get_if<FetchParams>(&instance.params)) {
        fetch(p->object, p->room);
    } else if (const auto* p = std::get_if<ConditionalParams>(&instance.params)) {
        plan.emplace_back(DriveTo{p->probe_room});
        plan.emplace_back(FindObjects{{p->probe_object}});
        if (world.count(p->probe_room, p->probe_object) >= 1)
            fetch(p->then_object, p->then_room);
        else
            fetch(p->else_object, p->else_room);
    } else if (const auto* p = std::get_if<EqualsParams>(&instance.params)) {
        plan.emplace_back(DriveTo{p->room});
        plan.emplace_back(FindObjects{{p->counted_object}});
        plan.emplace_back(FindObjects{{p->moved_object}});
        int remaining = world.count(p->room, p->counted_object);
        while (remaining > 0) {
            int batch = std::min(remaining, static_cast<int>(kCarryCapacity));
            for (int i = 0; i < batch; ++i)
                plan.emplace_back(GraspObject{p->moved_object});
            plan.emplace_back(DriveTo{Room::parlor});
            for (int i = 0; i < batch; ++i)
                plan.emplace_back(PlaceObject{p->moved_object});
            remaining -= batch;
            if (remaining > 0)
                plan.emplace_back(DriveTo{p->room});
        }
    } else {
        const auto& d = std::get<DistributeParams>(instance.params);
        std::vector<Room> targets;
        for (auto room : kAllRooms) {
            if (room != d.start_room)
                targets.push_back(room);
        }
        plan.emplace_back(DriveTo{d.start_room});
        plan.emplace_back(FindObjects{{d.object}});
        std::size_t next = 0;
        while (next < targets.size()) {
            auto batch = std::min(targets.size() - next, kCarryCapacity);
            if (next > 0)
                plan.emplace_back(DriveTo{d.start_room});
            for (std::size_t i = 0; i < batch; ++i)
                plan.emplace_back(GraspObject{d.object});
            for (std::size_t i = 0; i < batch; ++i) {
                plan.emplace_back(DriveTo{targets[next + i]});
                plan.emplace_back(PlaceObject{d.object});
            }
            next += batch;
        }
    }
    plan.emplace_back(Exit{});
    return plan;
}

TaskParams default_params(TaskKind kind) {
    switch (kind) {
    case TaskKind::fetch:
        return FetchParams{};
    case TaskKind::conditional:
        return ConditionalParams{};
    case TaskKind::equals:
        return EqualsParams{};
    case TaskKind::distribute:
        return DistributeParams{};
    }
    return FetchParams{};
}

} // namespace housebot
