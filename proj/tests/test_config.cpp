// SPDX-License-Identifier: Apache-2.0
#include "housebot/config.hpp"
#include "housebot/errors.hpp"

#include <doctest.h>

#include <filesystem>

using namespace housebot;

TEST_CASE("defaults") {
    auto c = parse_experiment_config("{}");
    CHECK(c == ExperimentConfig{});
    CHECK(c.resolved_techniques().size() == 9);
    CHECK(c.backends.size() == 1);
    CHECK(c.backends[0].type == BackendType::oracle);
}

TEST_CASE("full configuration") {
    auto c = parse_experiment_config(R"(
experiment: demo
tasks: [fetch, Equals]
techniques: [af_cot, "af+react+std"]
repetitions: 3
base_seed: 99
parallelism: 2
output_dir: out
generator: {min_distractors: 0, max_distractors: 1, min_count: 1, max_count: 2}
backends:
  - name: local
    type: chat_completions
    endpoint: http://127.0.0.1:8000/v1
    model: tiny
    temperature: 0.5
    api_key_env: ""
    max_in_flight: 2
)");
    CHECK(c.experiment == "demo");
    CHECK(c.kinds == std::vector<TaskKind>{TaskKind::fetch, TaskKind::equals});
    CHECK(c.resolved_techniques() ==
          std::vector<TechniqueConfig>{parse_technique("af_cot"), parse_technique("af+react+std")});
    CHECK(c.base_seed == 99);
    CHECK(c.generator.max_distractors == 1);
    REQUIRE(c.backends.size() == 1);
    CHECK(c.backends[0].type == BackendType::chat_completions);
    CHECK(c.backends[0].remote.temperature == 0.5);
    CHECK(c.backends[0].remote.api_key_env.empty());
}

TEST_CASE("round trip") {
    ExperimentConfig c;
    c.experiment = "round";
    c.techniques = {"af_eip", "af+cot+std"};
    c.kinds = {TaskKind::distribute};
    c.repetitions = 20;
    c.base_seed = 18446744073709551615ULL;
    BackendSelector remote{BackendType::chat_completions, BackendConfig{.name = "r", .model = "m", .temperature = 0.1}};
    remote.remote.timeout_s = 12.5;
    c.backends.push_back(remote);
    auto again = parse_experiment_config(to_yaml(c));
    CHECK(again == c);
    CHECK(to_yaml(again) == to_yaml(c));
}

TEST_CASE("shipped configs parse") {
    for (const auto& entry : std::filesystem::directory_iterator{HOUSEBOT_DATA_DIR "/../configs"}) {
        CAPTURE(entry.path().string());
        auto c = load_experiment_config(entry.path());
        CHECK_NOTHROW(c.validate());
        CHECK(parse_experiment_config(to_yaml(c)) == c);
    }
}

TEST_CASE("invalid configurations") {
    CHECK_THROWS_AS(parse_experiment_config("repetitions: 0"), ConfigError);
    CHECK_THROWS_AS(parse_experiment_config("parallelism: 0"), ConfigError);
    CHECK_THROWS_AS(parse_experiment_config("colour: blue"), ConfigError);
    CHECK_THROWS_AS(parse_experiment_config("tasks: [Juggle]"), ConfigError);
    CHECK_THROWS_AS(parse_experiment_config("backends: [{name: x, type: carrier_pigeon}]"), ConfigError);
    CHECK_THROWS_AS(parse_experiment_config("backends: [{name: x, type: chat_completions, model: m, api_key: sk}]"),
                    ConfigError);
    CHECK_THROWS_AS(parse_experiment_config("repetitions: [1"), ConfigError);
    try {
        parse_experiment_config("techniques: [af_eip, af+cot+react]");
        FAIL("expected an error");
    } catch (const ConfigError& e) {
        CHECK(std::string{e.what()}.find("af+cot+react") != std::string::npos);
    }
}

TEST_CASE("remote agents fail fast without their key") {
    BackendSelector s{BackendType::chat_completions,
                      BackendConfig{.name = "r", .model = "m", .api_key_env = "HOUSEBOT_MISSING_KEY_VAR"}};
    CHECK_THROWS_AS(make_agent(s), ConfigError);
    CHECK(make_agent(BackendSelector{})->model() == "oracle");
}
