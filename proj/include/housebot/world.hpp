// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

namespace housebot {

class ObjectCatalog;

enum class Room : std::uint8_t { study, parlor, kitchen, bedroom };

inline constexpr std::array<Room, 4> kAllRooms{Room::study, Room::parlor, Room::kitchen, Room::bedroom};
inline constexpr std::size_t kCarryCapacity = 2;

std::string_view to_string(Room room);
std::optional<Room> parse_room(std::string_view name);

enum class ActionName : std::uint8_t { drive_to_location, find_object, grasp_object, place_object, exit };

inline constexpr std::array<ActionName, 5> kAllActions{
    ActionName::drive_to_location, ActionName::find_object, ActionName::grasp_object,
    ActionName::place_object,      ActionName::exit,
};

std::string_view to_string(ActionName name);
std::optional<ActionName> parse_action_name(std::string_view name);

/// Small value set of action names, iterated in canonical order.
class ActionSet {
public:
    constexpr ActionSet() = default;
    ActionSet(std::initializer_list<ActionName> names);

    static ActionSet all();

    bool contains(ActionName name) const { return (bits_ >> bit(name)) & 1U; }
    void insert(ActionName name) { bits_ |= static_cast<std::uint8_t>(1U << bit(name)); }
    void erase(ActionName name) { bits_ &= static_cast<std::uint8_t>(~(1U << bit(name))); }
    std::size_t size() const;
    bool empty() const { return bits_ == 0; }
    std::vector<ActionName> names() const;

    bool operator==(const ActionSet&) const = default;

private:
    static constexpr unsigned bit(ActionName name) { return static_cast<unsigned>(name); }
    std::uint8_t bits_ = 0;
};

std::string to_string(const ActionSet& set);

struct DriveTo {
    Room location;
    bool operator==(const DriveTo&) const = default;
};

struct FindObjects {
    std::vector<std::string> object_names;
    bool operator==(const FindObjects&) const = default;
};

struct GraspObject {
    std::string object_name;
    bool operator==(const GraspObject&) const = default;
};

struct PlaceObject {
    std::string object_name;
    bool operator==(const PlaceObject&) const = default;
};

struct Exit {
    bool operator==(const Exit&) const = default;
};

using ActionCall = std::variant<DriveTo, FindObjects, GraspObject, PlaceObject, Exit>;

ActionName action_name(const ActionCall& call);

struct ActionResponse {
    std::string text;
    bool ok = false;
    /// Counts reported by find_object, in request order. Empty for other actions.
    std::vector<std::pair<std::string, int>> observed;

    bool operator==(const ActionResponse&) const = default;
};

/// Objects present in one room. Zero counts are never stored.
using RoomContents = std::map<std::string, int, std::less<>>;

struct WorldState {
    std::array<RoomContents, 4> placements;
    Room robot_location = Room::parlor;
    std::vector<std::string> carried;
    int calls_executed = 0;

    /// The operator never moves.
    static constexpr Room operator_location() { return Room::parlor; }

    const RoomContents& contents(Room room) const { return placements[static_cast<std::size_t>(room)]; }
    int count(Room room, std::string_view object) const;
    void set_count(Room room, const std::string& object, int count);
    void add(Room room, const std::string& object, int delta);

    /// Instances of `object` in all rooms plus in the gripper.
    int total(std::string_view object) const;
    bool is_carrying(std::string_view object) const;

    bool operator==(const WorldState&) const = default;
};

/// Applies one call in place and returns the text handed back to the agent.
/// Semantic failures are reported through `ok == false`; they never throw.
ActionResponse apply_action(WorldState& state, const ActionCall& call, const ObjectCatalog& catalog);
ActionResponse apply_action(WorldState& state, const ActionCall& call);

struct StepResult {
    WorldState state;
    ActionResponse response;
};

/// Pure form of apply_action.
StepResult execute_action(const WorldState& state, const ActionCall& call, const ObjectCatalog& catalog);
StepResult execute_action(const WorldState& state, const ActionCall& call);

/// Actions that can achieve their effect in `state` (adaptive function set).
ActionSet available_actions(const WorldState& state);

} // namespace housebot
