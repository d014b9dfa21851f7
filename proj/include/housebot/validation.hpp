// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "housebot/catalog.hpp"
#include "housebot/prompting.hpp"
#include "housebot/runner.hpp"
#include "housebot/world.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace housebot {

struct CheckResult {
    std::string name;
    bool passed = false;
    std::string detail;
};

using ActionExecutor = std::function<ActionResponse(WorldState&, const ActionCall&)>;

/// Random schema-valid call sequences over random worlds: per-object totals
/// conserved, never more than two carried objects, failed calls leave the
/// world untouched, the call counter advances by one, and excluded adaptive
/// functions always fail.
CheckResult check_world_properties(int sequences, std::uint64_t seed, const ObjectCatalog& catalog,
                                   const ActionExecutor& executor = {});

/// Oracle agent over every kind and preset: success everywhere, within budget,
/// with the technique structure intact.
CheckResult check_oracle_matrix(int repetitions, std::uint64_t base_seed, const ObjectCatalog& catalog,
                                int parallelism = 1);

/// Replays the shipped Fetch transcript over its fixture world.
CheckResult check_fetch_fixture_replay(std::string_view jsonl);

/// Replays the worked example through the simulator and compares every tool response.
CheckResult check_worked_example(const WorkedExample& example, const ObjectCatalog& catalog);

/// Structural violations of the technique configuration in a recorded
/// episode, or nullopt when the transcript is consistent.
std::optional<std::string> technique_structure_violation(const EpisodeResult& result, const ObjectCatalog& catalog);

struct ValidationOptions {
    int repetitions = 50;
    std::uint64_t base_seed = 0;
    int fuzz_sequences = 10000;
    int parallelism = 1;
    const ObjectCatalog* catalog = nullptr;
};

std::vector<CheckResult> run_validation(const ValidationOptions& options);

} // namespace housebot
