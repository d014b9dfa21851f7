// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "housebot/backends.hpp"
#include "housebot/catalog.hpp"
#include "housebot/prompting.hpp"
#include "housebot/tasks.hpp"

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace housebot {

inline constexpr int kCallBudget = 40;
inline constexpr int kTurnLimit = 120;

enum class FailureReason : std::uint8_t {
    none,
    malformed_call,
    budget_exhausted_target_unmet,
    exited_target_unmet,
    infrastructure_error,
};

std::string_view to_string(FailureReason reason);
std::optional<FailureReason> parse_failure_reason(std::string_view name);

struct EpisodeResult {
    TaskInstance instance;
    TechniqueConfig technique;
    std::string backend;  // matrix label; empty for single episodes
    std::string model;
    double temperature = 0.0;
    bool success = false;
    FailureReason failure_reason = FailureReason::none;
    int calls_used = 0;
    int turns = 0;
    double agent_wait_s = 0.0;
    std::string error;  // infrastructure or malformed-reply detail
    std::vector<Message> transcript;

    TaskKind kind() const { return instance.kind(); }
    std::uint64_t seed() const { return instance.seed; }
};

struct EpisodeOptions {
    const ObjectCatalog* catalog = nullptr;  // null: builtin catalog
    int call_budget = kCallBudget;
    int turn_limit = kTurnLimit;
};

/// Runs one episode to completion. Replay errors propagate; transport errors
/// are recorded as infrastructure failures.
EpisodeResult run_episode(const TaskInstance& instance, const TechniqueConfig& technique, Agent& agent,
                          const EpisodeOptions& options = {});

/// Seed for (kind, repetition); independent of the technique so that all
/// techniques see the same task instances.
std::uint64_t derive_seed(std::uint64_t base_seed, TaskKind kind, int repetition);

struct MatrixBackend {
    std::string label;
    std::shared_ptr<Agent> agent;  // must be thread-safe when parallelism > 1
};

struct MatrixSpec {
    std::vector<TaskKind> kinds;
    std::vector<TechniqueConfig> techniques;
    std::vector<MatrixBackend> backends;
    int repetitions = 1;
    std::uint64_t base_seed = 0;
    int parallelism = 1;
    const ObjectCatalog* catalog = nullptr;
    GeneratorOptions generator;
};

/// Called from worker threads, serialized by the runner.
using ResultSink = std::function<void(const EpisodeResult&)>;

/// One result per backend x kind x technique x repetition, ordered that way
/// regardless of scheduling.
std::vector<EpisodeResult> run_matrix(const MatrixSpec& spec, const ResultSink& sink = {});

} // namespace housebot
