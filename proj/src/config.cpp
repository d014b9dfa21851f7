// SPDX-License-Identifier: Apache-2.0
#include "housebot/config.hpp"

#include "housebot/errors.hpp"
#include "housebot/transcript.hpp"

#include <yaml-cpp/yaml.h>

#include <set>

namespace housebot {

namespace {

const std::set<std::string> kTopLevelKeys{
    "experiment", "backends", "tasks", "techniques", "repetitions", "base_seed",
    "parallelism", "output_dir", "catalog", "generator",
};
const std::set<std::string> kBackendKeys{
    "name", "type", "endpoint", "model", "temperature", "api_key_env",
    "timeout_s", "max_retries", "retry_backoff_s", "max_in_flight",
};
const std::set<std::string> kGeneratorKeys{"min_distractors", "max_distractors", "min_count", "max_count"};

void check_keys(const YAML::Node& node, const std::set<std::string>& allowed, const std::string& where) {
    for (const auto& item : node) {
        auto key = item.first.as<std::string>();
        if (key == "api_key")
            throw ConfigError(where + ": API keys must come from environment variables (use api_key_env)");
        if (!allowed.contains(key))
            throw ConfigError(where + ": unknown key '" + key + "'");
    }
}

template <typename T>
void read(const YAML::Node& node, const char* key, T& out) {
    if (node[key])
        out = node[key].as<T>();
}

std::string_view type_name(BackendType type) { return type == BackendType::oracle ? "oracle" : "chat_completions"; }

std::string lowercase_kind(TaskKind kind) {
    std::string out{to_string(kind)};
    for (auto& c : out)
        c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return out;
}

} // namespace

void ExperimentConfig::validate() const {
    if (experiment.empty() || experiment.find('/') != std::string::npos)
        throw ConfigError("experiment name must be non-empty and contain no '/'");
    if (repetitions < 1)
        throw ConfigError("repetitions must be at least 1");
    if (parallelism < 1)
        throw ConfigError("parallelism must be at least 1");
    if (kinds.empty())
        throw ConfigError("no task kinds selected");
    if (backends.empty())
        throw ConfigError("no backends configured");
    std::set<std::string> names;
    for (const auto& b : backends) {
        if (b.remote.name.empty())
            throw ConfigError("every backend needs a name");
        if (!names.insert(b.remote.name).second)
            throw ConfigError("duplicate backend name '" + b.remote.name + "'");
        if (b.type == BackendType::chat_completions && b.remote.model.empty())
            throw ConfigError("backend '" + b.remote.name + "': model is required");
    }
    for (const auto& name : techniques) {
        try {
            parse_technique(name);
        } catch (const ConfigError& e) {
            throw ConfigError("technique preset '" + name + "': " + e.what());
        }
    }
}

std::vector<TechniqueConfig> ExperimentConfig::resolved_techniques() const {
    std::vector<TechniqueConfig> out;
    if (techniques.empty()) {
        for (const auto& preset : technique_presets())
            out.push_back(preset.config);
        return out;
    }
    for (const auto& name : techniques)
        out.push_back(parse_technique(name));
    return out;
}

ExperimentConfig parse_experiment_config(std::string_view yaml_text) {
    ExperimentConfig config;
    try {
        YAML::Node root = YAML::Load(std::string{yaml_text});
        if (!root.IsMap())
            throw ConfigError("config: top level must be a mapping");
        check_keys(root, kTopLevelKeys, "config");
        read(root, "experiment", config.experiment);
        read(root, "repetitions", config.repetitions);
        read(root, "base_seed", config.base_seed);
        read(root, "parallelism", config.parallelism);
        read(root, "output_dir", config.output_dir);
        read(root, "catalog", config.catalog);
        if (root["tasks"]) {
            config.kinds.clear();
            for (const auto& kind : root["tasks"])
                config.kinds.push_back(parse_task_kind(kind.as<std::string>()));
        }
        read(root, "techniques", config.techniques);
        if (root["generator"]) {
            check_keys(root["generator"], kGeneratorKeys, "generator");
            read(root["generator"], "min_distractors", config.generator.min_distractors);
            read(root["generator"], "max_distractors", config.generator.max_distractors);
            read(root["generator"], "min_count", config.generator.min_count);
            read(root["generator"], "max_count", config.generator.max_count);
        }
        if (root["backends"]) {
            config.backends.clear();
            for (const auto& node : root["backends"]) {
                check_keys(node, kBackendKeys, "backend");
                BackendSelector b;
                auto type = node["type"] ? node["type"].as<std::string>() : std::string{"oracle"};
                if (type == "oracle")
                    b.type = BackendType::oracle;
                else if (type == "chat_completions")
                    b.type = BackendType::chat_completions;
                else
                    throw ConfigError("backend type '" + type + "' (expected oracle or chat_completions)");
                auto& r = b.remote;
                read(node, "name", r.name);
                read(node, "endpoint", r.endpoint);
                read(node, "model", r.model);
                read(node, "temperature", r.temperature);
                read(node, "api_key_env", r.api_key_env);
                read(node, "timeout_s", r.timeout_s);
                read(node, "max_retries", r.max_retries);
                read(node, "retry_backoff_s", r.retry_backoff_s);
                read(node, "max_in_flight", r.max_in_flight);
                config.backends.push_back(std::move(b));
            }
        }
    } catch (const YAML::Exception& e) {
        throw ConfigError(std::string{"config: "} + e.what());
    }
    config.validate();
    return config;
}

ExperimentConfig load_experiment_config(const std::filesystem::path& path) {
    try {
        return parse_experiment_config(read_file(path));
    } catch (const ParseError& e) {
        throw ConfigError(e.what());
    }
}

std::string to_yaml(const ExperimentConfig& config) {
    YAML::Emitter out;
    out.SetDoublePrecision(17);
    out << YAML::BeginMap;
    out << YAML::Key << "experiment" << YAML::Value << config.experiment;
    out << YAML::Key << "tasks" << YAML::Value << YAML::Flow << YAML::BeginSeq;
    for (auto kind : config.kinds)
        out << lowercase_kind(kind);
    out << YAML::EndSeq;
    out << YAML::Key << "techniques" << YAML::Value << YAML::BeginSeq;
    for (const auto& t : config.techniques)
        out << t;
    out << YAML::EndSeq;
    out << YAML::Key << "repetitions" << YAML::Value << config.repetitions;
    out << YAML::Key << "base_seed" << YAML::Value << config.base_seed;
    out << YAML::Key << "parallelism" << YAML::Value << config.parallelism;
    out << YAML::Key << "output_dir" << YAML::Value << config.output_dir;
    out << YAML::Key << "catalog" << YAML::Value << config.catalog;
    out << YAML::Key << "generator" << YAML::Value << YAML::BeginMap;
    out << YAML::Key << "min_distractors" << YAML::Value << config.generator.min_distractors;
    out << YAML::Key << "max_distractors" << YAML::Value << config.generator.max_distractors;
    out << YAML::Key << "min_count" << YAML::Value << config.generator.min_count;
    out << YAML::Key << "max_count" << YAML::Value << config.generator.max_count;
    out << YAML::EndMap;
    out << YAML::Key << "backends" << YAML::Value << YAML::BeginSeq;
    for (const auto& b : config.backends) {
        const auto& r = b.remote;
        out << YAML::BeginMap;
        out << YAML::Key << "name" << YAML::Value << r.name;
        out << YAML::Key << "type" << YAML::Value << std::string{type_name(b.type)};
        out << YAML::Key << "endpoint" << YAML::Value << r.endpoint;
        out << YAML::Key << "model" << YAML::Value << r.model;
        out << YAML::Key << "temperature" << YAML::Value << r.temperature;
        out << YAML::Key << "api_key_env" << YAML::Value << r.api_key_env;
        out << YAML::Key << "timeout_s" << YAML::Value << r.timeout_s;
        out << YAML::Key << "max_retries" << YAML::Value << r.max_retries;
        out << YAML::Key << "retry_backoff_s" << YAML::Value << r.retry_backoff_s;
        out << YAML::Key << "max_in_flight" << YAML::Value << r.max_in_flight;
        out << YAML::EndMap;
    }
    out << YAML::EndSeq;
    out << YAML::EndMap;
    return std::string{out.c_str()} + "\n";
}

std::shared_ptr<Agent> make_agent(const BackendSelector& selector) {
    if (selector.type == BackendType::oracle)
        return std::make_shared<OracleAgent>();
    return std::make_shared<ChatCompletionsAgent>(selector.remote);
}

} // namespace housebot
