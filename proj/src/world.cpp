// SPDX-License-Identifier: Apache-2.0
#include "housebot/world.hpp"

#include "housebot/catalog.hpp"

#include <algorithm>
#include <numeric>

namespace housebot {

namespace {

constexpr std::array<std::string_view, 4> kRoomNames{"study", "parlor", "kitchen", "bedroom"};
constexpr std::array<std::string_view, 5> kActionNames{
    "drive_to_location", "find_object", "grasp_object", "place_object", "exit",
};

std::size_t index(Room room) { return static_cast<std::size_t>(room); }

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

} // namespace

std::string_view to_string(Room room) { return kRoomNames[index(room)]; }

std::optional<Room> parse_room(std::string_view name) {
    for (auto room : kAllRooms) {
        if (to_string(room) == name)
            return room;
    }
    return std::nullopt;
}

std::string_view to_string(ActionName name) { return kActionNames[static_cast<std::size_t>(name)]; }

std::optional<ActionName> parse_action_name(std::string_view name) {
    for (auto action : kAllActions) {
        if (to_string(action) == name)
            return action;
    }
    return std::nullopt;
}

ActionSet::ActionSet(std::initializer_list<ActionName> names) {
    for (auto name : names)
        insert(name);
}

ActionSet ActionSet::all() {
    ActionSet set;
    for (auto name : kAllActions)
        set.insert(name);
    return set;
}

std::size_t ActionSet::size() const { return names().size(); }

std::vector<ActionName> ActionSet::names() const {
    std::vector<ActionName> out;
    for (auto name : kAllActions) {
        if (contains(name))
            out.push_back(name);
    }
    return out;
}

std::string to_string(const ActionSet& set) {
    std::string out = "{";
    for (auto name : set.names()) {
        if (out.size() > 1)
            out += ", ";
        out += to_string(name);
    }
    return out + "}";
}

ActionName action_name(const ActionCall& call) {
    return std::visit(overloaded{
                          [](const DriveTo&) { return ActionName::drive_to_location; },
                          [](const FindObjects&) { return ActionName::find_object; },
                          [](const GraspObject&) { return ActionName::grasp_object; },
                          [](const PlaceObject&) { return ActionName::place_object; },
                          [](const Exit&) { return ActionName::exit; },
                      },
                      call);
}

int WorldState::count(Room room, std::string_view object) const {
    const auto& items = contents(room);
    auto it = items.find(object);
    return it == items.end() ? 0 : it->second;
}

void WorldState::set_count(Room room, const std::string& object, int count) {
    auto& items = placements[index(room)];
    if (count <= 0)
        items.erase(object);
    else
        items[object] = count;
}

void WorldState::add(Room room, const std::string& object, int delta) {
    set_count(room, object, count(room, object) + delta);
}

int WorldState::total(std::string_view object) const {
    int sum = 0;
    for (auto room : kAllRooms)
        sum += count(room, object);
    return sum + static_cast<int>(std::count(carried.begin(), carried.end(), object));
}

bool WorldState::is_carrying(std::string_view object) const {
    return std::find(carried.begin(), carried.end(), object) != carried.end();
}

ActionResponse apply_action(WorldState& state, const ActionCall& call, const ObjectCatalog& catalog) {
    ++state.calls_executed;
    const std::string room{to_string(state.robot_location)};

    return std::visit(
        overloaded{
            [&](const DriveTo& drive) {
                state.robot_location = drive.location;
                return ActionResponse{
                    "You successfully arrived in the new location " + std::string{to_string(drive.location)} + ".",
                    true,
                    {},
                };
            },
            [&](const FindObjects& find) {
                if (find.object_names.empty())
                    return ActionResponse{"You did not name any objects to search for.", false, {}};
                ActionResponse response{"The following items were found in the " + room + ": ", true, {}};
                for (std::size_t i = 0; i < find.object_names.size(); ++i) {
                    const auto& name = find.object_names[i];
                    int count = state.count(state.robot_location, name);
                    if (i > 0)
                        response.text += ", ";
                    response.text += catalog.count_phrase(name, count);
                    response.observed.emplace_back(name, count);
                }
                return response;
            },
            [&](const GraspObject& grasp) {
                // Capacity is reported first when both failures apply.
                if (state.carried.size() >= kCarryCapacity)
                    return ActionResponse{"You cannot carry more than two objects.", false, {}};
                if (state.count(state.robot_location, grasp.object_name) < 1)
                    return ActionResponse{"There is no " + grasp.object_name + " in the " + room + ".", false, {}};
                state.add(state.robot_location, grasp.object_name, -1);
                state.carried.push_back(grasp.object_name);
                return ActionResponse{"You successfully grasped the object " + grasp.object_name + ".", true, {}};
            },
            [&](const PlaceObject& place) {
                auto it = std::find(state.carried.begin(), state.carried.end(), place.object_name);
                if (it == state.carried.end())
                    return ActionResponse{"You are not carrying " + with_article(place.object_name) + ".", false, {}};
                state.carried.erase(it);
                state.add(state.robot_location, place.object_name, 1);
                return ActionResponse{"You successfully placed the object " + place.object_name + ".", true, {}};
            },
            [&](const Exit&) { return ActionResponse{"The task has been marked as completed.", true, {}}; },
        },
        call);
}

ActionResponse apply_action(WorldState& state, const ActionCall& call) {
    return apply_action(state, call, ObjectCatalog::builtin());
}

StepResult execute_action(const WorldState& state, const ActionCall& call, const ObjectCatalog& catalog) {
    StepResult result{state, {}};
    result.response = apply_action(result.state, call, catalog);
    return result;
}

StepResult execute_action(const WorldState& state, const ActionCall& call) {
    return execute_action(state, call, ObjectCatalog::builtin());
}

ActionSet available_actions(const WorldState& state) {
    auto set = ActionSet::all();
    if (state.carried.empty())
        set.erase(ActionName::place_object);
    if (state.carried.size() >= kCarryCapacity)
        set.erase(ActionName::grasp_object);
    return set;
}

} // namespace housebot
