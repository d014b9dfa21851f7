// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "housebot/backends.hpp"
#include "housebot/tasks.hpp"

#include <cstdint>
#include <filesystem>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

namespace housebot {

enum class BackendType { oracle, chat_completions };

struct BackendSelector {
    BackendType type = BackendType::oracle;
    BackendConfig remote;  // name is used for both types

    bool operator==(const BackendSelector&) const = default;
};

/// Declarative experiment description. API keys are never stored here, only
/// the names of the environment variables holding them.
struct ExperimentConfig {
    std::string experiment = "experiment";
    std::vector<BackendSelector> backends{BackendSelector{BackendType::oracle, BackendConfig{.name = "oracle"}}};
    std::vector<TaskKind> kinds{kAllTaskKinds.begin(), kAllTaskKinds.end()};
    std::vector<std::string> techniques;  // preset names or '+'-joined flags; empty means all presets
    int repetitions = 50;
    std::uint64_t base_seed = 0;
    int parallelism = 1;
    std::string output_dir = "runs";
    std::string catalog;  // empty: builtin catalog
    GeneratorOptions generator;

    /// Throws ConfigError naming the offending entry.
    void validate() const;

    /// Technique names resolved in order; all nine presets when none are listed.
    std::vector<TechniqueConfig> resolved_techniques() const;

    bool operator==(const ExperimentConfig&) const = default;
};

ExperimentConfig parse_experiment_config(std::string_view yaml_text);
ExperimentConfig load_experiment_config(const std::filesystem::path& path);
std::string to_yaml(const ExperimentConfig& config);

/// Instantiates the agent for a backend selector. Remote backends fail fast
/// when their API key variable is missing.
std::shared_ptr<Agent> make_agent(const BackendSelector& selector);

} // namespace housebot
