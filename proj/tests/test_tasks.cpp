// SPDX-License-Identifier: Apache-2.0
#include "housebot/json_io.hpp"
#include "housebot/tasks.hpp"
#include "housebot/world.hpp"

#include <doctest.h>

using namespace housebot;

namespace {

WorldState run_plan(const TaskInstance& task) {
    WorldState w = task.initial_world;
    for (const auto& call : oracle_plan(task)) {
        auto r = apply_action(w, call);
        REQUIRE(r.ok);
    }
    return w;
}

} // namespace

TEST_CASE("generation is deterministic and matches the template") {
    for (auto kind : kAllTaskKinds) {
        for (std::uint64_t seed = 0; seed < 40; ++seed) {
            auto a = generate_task(kind, seed, ObjectCatalog::builtin());
            auto b = generate_task(kind, seed, ObjectCatalog::builtin());
            CHECK(json(a).dump() == json(b).dump());
            CHECK(a.kind() == kind);
            CHECK(a.instruction == render_instruction(a.params, ObjectCatalog::builtin()));
            CHECK(a.initial_world.robot_location == Room::parlor);
            CHECK(a.initial_world.carried.empty());
            CHECK_FALSE(check_target(a, a.initial_world));
        }
    }
}

TEST_CASE("oracle plans reach the target") {
    for (auto kind : kAllTaskKinds) {
        for (std::uint64_t seed = 0; seed < 200; ++seed) {
            auto task = generate_task(kind, seed, ObjectCatalog::builtin());
            auto plan = oracle_plan(task);
            CHECK(plan.size() <= 40);
            CHECK(std::holds_alternative<Exit>(plan.back()));
            CHECK(check_target(task, run_plan(task)));
        }
    }
}

TEST_CASE("fetch instruction and plan length") {
    TaskInstance t;
    t.params = FetchParams{"sponge", Room::kitchen};
    t.initial_world.set_count(Room::kitchen, "sponge", 3);
    CHECK(render_instruction(t.params, ObjectCatalog::builtin()) == "Please get me a sponge from the kitchen.");
    // drive, find, grasp, drive back, place, exit
    CHECK(oracle_plan(t).size() == 6);
}

TEST_CASE("equals target holds only for the exact count") {
    TaskInstance t;
    t.params = EqualsParams{"apple", "fork", Room::kitchen};
    t.initial_world.set_count(Room::kitchen, "apple", 2);
    t.initial_world.set_count(Room::kitchen, "fork", 4);
    CHECK(render_instruction(t.params, ObjectCatalog::builtin()) ==
          "For every apple in the kitchen, move a fork from the kitchen to the parlor.");
    // Brute force over how many forks end up in the parlor.
    for (int k = 0; k <= 4; ++k) {
        WorldState w = t.initial_world;
        w.set_count(Room::kitchen, "fork", 4 - k);
        w.set_count(Room::parlor, "fork", k);
        CHECK(check_target(t, w) == (k == 2));
    }
    // Forks that leave the kitchen for another room do not count.
    WorldState w = t.initial_world;
    w.set_count(Room::kitchen, "fork", 2);
    w.set_count(Room::study, "fork", 2);
    CHECK_FALSE(check_target(t, w));
}

TEST_CASE("equals with one counted object takes seven calls") {
    TaskInstance t;
    t.params = EqualsParams{"apple", "fork", Room::kitchen};
    t.initial_world.set_count(Room::kitchen, "apple", 1);
    t.initial_world.set_count(Room::kitchen, "fork", 2);
    CHECK(oracle_plan(t).size() == 7);
}

TEST_CASE("conditional follows the probe") {
    TaskInstance t;
    ConditionalParams p{"apple", Room::study, "cup", Room::kitchen, "pen", Room::bedroom};
    t.params = p;
    t.initial_world.set_count(Room::kitchen, "cup", 1);
    t.initial_world.set_count(Room::bedroom, "pen", 1);

    WorldState else_done = t.initial_world;
    else_done.set_count(Room::bedroom, "pen", 0);
    else_done.set_count(Room::parlor, "pen", 1);
    WorldState then_done = t.initial_world;
    then_done.set_count(Room::kitchen, "cup", 0);
    then_done.set_count(Room::parlor, "cup", 1);

    CHECK(check_target(t, else_done));
    CHECK_FALSE(check_target(t, then_done));

    t.initial_world.set_count(Room::study, "apple", 2);
    then_done.set_count(Room::study, "apple", 2);
    else_done.set_count(Room::study, "apple", 2);
    CHECK(check_target(t, then_done));
    CHECK_FALSE(check_target(t, else_done));
}

TEST_CASE("distribute needs every room") {
    TaskInstance t;
    t.params = DistributeParams{"cup", Room::kitchen};
    t.initial_world.set_count(Room::kitchen, "cup", 4);
    WorldState w = t.initial_world;
    CHECK_FALSE(check_target(t, w));
    w.set_count(Room::kitchen, "cup", 1);
    w.set_count(Room::study, "cup", 1);
    w.set_count(Room::parlor, "cup", 1);
    CHECK_FALSE(check_target(t, w));
    w.set_count(Room::bedroom, "cup", 1);
    CHECK(check_target(t, w));
}

TEST_CASE("task kind names") {
    CHECK(to_string(TaskKind::fetch) == "Fetch");
    CHECK(parse_task_kind("distribute") == TaskKind::distribute);
    CHECK(parse_task_kind("Equals") == TaskKind::equals);
    CHECK_THROWS(parse_task_kind("juggle"));
}

TEST_CASE("task instances round trip through json") {
    for (auto kind : kAllTaskKinds) {
        auto t = generate_task(kind, 7, ObjectCatalog::builtin());
        auto back = json(t).get<TaskInstance>();
        CHECK(json(back).dump() == json(t).dump());
    }
}
