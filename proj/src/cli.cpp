// SPDX-License-Identifier: Apache-2.0
#include "housebot/cli.hpp"

#include "housebot/config.hpp"
#include "housebot/errors.hpp"
#include "housebot/report.hpp"
#include "housebot/transcript.hpp"
#include "housebot/validation.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <filesystem>
#include <optional>
#include <ostream>
#include <sstream>

namespace housebot {

namespace fs = std::filesystem;

namespace {

std::vector<std::string> split_list(const std::string& text) {
    std::vector<std::string> items;
    std::stringstream in{text};
    std::string item;
    while (std::getline(in, item, ',')) {
        item.erase(0, item.find_first_not_of(' '));
        item.erase(item.find_last_not_of(' ') + 1);
        if (!item.empty())
            items.push_back(item);
    }
    return items;
}

struct RunFlags {
    std::string config;
    std::string backend;
    std::string tasks;
    std::string techniques;
    std::optional<int> repetitions;
    std::optional<std::uint64_t> seed;
    std::optional<int> parallelism;
    std::string out_dir;
    std::string format = "markdown";
    std::string catalog;
};

ObjectCatalog load_catalog(const std::string& path) {
    return path.empty() ? ObjectCatalog::builtin() : ObjectCatalog::load(path);
}

ExperimentConfig resolve_config(const RunFlags& flags) {
    ExperimentConfig config = flags.config.empty() ? ExperimentConfig{} : load_experiment_config(flags.config);
    if (!flags.backend.empty()) {
        if (flags.backend == "oracle") {
            config.backends = {BackendSelector{BackendType::oracle, BackendConfig{.name = "oracle"}}};
        } else {
            auto it = std::find_if(config.backends.begin(), config.backends.end(),
                                   [&](const BackendSelector& b) { return b.remote.name == flags.backend; });
            if (it == config.backends.end())
                throw ConfigError("no backend named '" + flags.backend + "' in the configuration");
            config.backends = {*it};
        }
    }
    if (!flags.tasks.empty()) {
        config.kinds.clear();
        for (const auto& name : split_list(flags.tasks))
            config.kinds.push_back(parse_task_kind(name));
    }
    if (!flags.techniques.empty())
        config.techniques = split_list(flags.techniques);
    if (flags.repetitions)
        config.repetitions = *flags.repetitions;
    if (flags.seed)
        config.base_seed = *flags.seed;
    if (flags.parallelism)
        config.parallelism = *flags.parallelism;
    if (!flags.out_dir.empty())
        config.output_dir = flags.out_dir;
    if (!flags.catalog.empty())
        config.catalog = flags.catalog;
    config.validate();
    return config;
}

int cmd_run(const RunFlags& flags, std::ostream& out, std::ostream& err) {
    ExperimentConfig config = resolve_config(flags);
    ReportFormat format = parse_report_format(flags.format);
    ObjectCatalog catalog = load_catalog(config.catalog);

    // Agents are built before any episode so a missing key fails fast.
    MatrixSpec spec;
    for (const auto& selector : config.backends)
        spec.backends.push_back({selector.remote.name, make_agent(selector)});
    spec.kinds = config.kinds;
    spec.techniques = config.resolved_techniques();
    spec.repetitions = config.repetitions;
    spec.base_seed = config.base_seed;
    spec.parallelism = config.parallelism;
    spec.catalog = &catalog;
    spec.generator = config.generator;

    const fs::path root = config.output_dir;
    const bool label_paths = spec.backends.size() > 1;
    auto results = run_matrix(spec, [&](const EpisodeResult& result) {
        write_file(transcript_path(root, config.experiment, label_paths ? result.backend : "", result),
                   transcript_jsonl(result, config.experiment));
    });

    json rows = json::array();
    int infrastructure = 0;
    for (const auto& result : results) {
        json row = result_row(result);
        row["transcript"] = transcript_path(fs::path{}, "", label_paths ? result.backend : "", result)
                                .lexically_normal()
                                .generic_string();
        rows.push_back(std::move(row));
        if (result.failure_reason == FailureReason::infrastructure_error)
            ++infrastructure;
    }
    json index = {{"format", std::string{kResultsFormat}},
                  {"experiment", config.experiment},
                  {"config", to_yaml(config)},
                  {"results", std::move(rows)}};
    const fs::path index_path = root / config.experiment / "results.json";
    write_file(index_path, index.dump(2) + "\n");

    out << render(aggregate(results), format);
    err << results.size() << " episodes; transcripts and result index under " << (root / config.experiment).string()
        << "\n";
    if (!results.empty() && infrastructure == static_cast<int>(results.size())) {
        err << "error: every episode failed with an infrastructure error\n";
        return kExitInfrastructure;
    }
    return kExitOk;
}

int cmd_validate(int repetitions, std::uint64_t seed, int parallelism, int fuzz, const std::string& catalog_path,
                 std::ostream& out) {
    ObjectCatalog catalog = load_catalog(catalog_path);
    ValidationOptions options;
    options.repetitions = repetitions;
    options.base_seed = seed;
    options.parallelism = parallelism;
    options.fuzz_sequences = fuzz;
    options.catalog = &catalog;
    std::optional<CheckResult> first_failure;
    for (const auto& check : run_validation(options)) {
        out << (check.passed ? "PASS " : "FAIL ") << check.name;
        if (!check.detail.empty())
            out << ": " << check.detail;
        out << "\n";
        if (!check.passed && !first_failure)
            first_failure = check;
    }
    if (first_failure) {
        out << "validation failed: " << first_failure->name << "\n";
        return kExitFailure;
    }
    out << "all checks passed\n";
    return kExitOk;
}

int cmd_replay(const std::string& path, const std::string& catalog_path, std::ostream& out, std::ostream& err) {
    ObjectCatalog catalog = load_catalog(catalog_path);
    RecordedEpisode recorded = load_transcript(path);
    const auto& instance = recorded.result.instance;
    for (auto room : kAllRooms) {
        for (const auto& [name, count] : instance.initial_world.contents(room)) {
            if (!catalog.contains(name)) {
                err << "divergence: object '" << name << "' in the recorded world is not in the catalog\n";
                return kExitFailure;
            }
        }
    }
    ReplayAgent agent{recorded.result.transcript, recorded.result.model};
    EpisodeOptions options;
    options.catalog = &catalog;
    try {
        auto live = run_episode(instance, recorded.result.technique, agent, options);
        if (live.success != recorded.result.success || live.failure_reason != recorded.result.failure_reason ||
            live.calls_used != recorded.result.calls_used) {
            err << "divergence: outcome " << to_string(live.failure_reason) << " after " << live.calls_used
                << " calls, recorded " << to_string(recorded.result.failure_reason) << " after "
                << recorded.result.calls_used << "\n";
            return kExitFailure;
        }
        out << "replay matches: " << live.calls_used << " calls, " << (live.success ? "success" : "failure") << "\n";
        return kExitOk;
    } catch (const ReplayMismatch& e) {
        err << "divergence at message " << e.message_index() << ": " << e.what() << "\n";
        return kExitFailure;
    } catch (const ReplayExhausted& e) {
        err << "divergence: " << e.what() << "\n";
        return kExitFailure;
    }
}

int cmd_report(const std::string& path, const std::string& format_name, std::ostream& out) {
    ReportFormat format = parse_report_format(format_name);
    json index;
    try {
        index = json::parse(read_file(path));
    } catch (const json::exception& e) {
        throw ParseError(path + ": " + e.what());
    }
    if (!index.is_object() || index.value("format", "") != kResultsFormat || !index.contains("results") ||
        !index["results"].is_array())
        throw ParseError(path + ": not a result index");
    std::vector<EpisodeResult> results;
    for (const auto& row : index["results"])
        results.push_back(parse_result_row(row));
    out << render(aggregate(results), format);
    return kExitOk;
}

} // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Household robot agent harness: simulate tasks, run prompting experiments, report results."};
    app.require_subcommand(1);

    RunFlags run_flags;
    auto* run = app.add_subcommand("run", "Run an experiment matrix");
    run->add_option("--config", run_flags.config, "Experiment file (YAML)")->check(CLI::ExistingFile);
    run->add_option("--backend", run_flags.backend, "Use only this backend ('oracle' or a configured name)");
    run->add_option("--tasks", run_flags.tasks, "Comma-separated task kinds");
    run->add_option("--techniques", run_flags.techniques, "Comma-separated presets or flag combinations");
    run->add_option("--repetitions", run_flags.repetitions, "Seeds per task kind");
    run->add_option("--seed", run_flags.seed, "Base seed");
    run->add_option("--parallelism", run_flags.parallelism, "Concurrent episodes");
    run->add_option("--out", run_flags.out_dir, "Output directory");
    run->add_option("--format", run_flags.format, "Report format: markdown, csv, json");
    run->add_option("--catalog", run_flags.catalog, "Object catalog CSV");

    int validate_reps = 50;
    std::uint64_t validate_seed = 0;
    int validate_parallelism = 1;
    int validate_fuzz = 10000;
    std::string validate_catalog;
    auto* validate = app.add_subcommand("validate", "Run the oracle suite, replay fixtures and world properties");
    validate->add_option("--repetitions", validate_reps, "Seeds per task kind")->check(CLI::PositiveNumber);
    validate->add_option("--seed", validate_seed, "Base seed");
    validate->add_option("--parallelism", validate_parallelism, "Concurrent episodes")->check(CLI::PositiveNumber);
    validate->add_option("--fuzz", validate_fuzz, "Random action sequences")->check(CLI::NonNegativeNumber);
    validate->add_option("--catalog", validate_catalog, "Object catalog CSV");

    std::string replay_path;
    std::string replay_catalog;
    auto* replay = app.add_subcommand("replay", "Replay a recorded transcript against the simulator");
    replay->add_option("transcript", replay_path, "Transcript JSONL")->required();
    replay->add_option("--catalog", replay_catalog, "Object catalog CSV");

    std::string report_path;
    std::string report_format = "markdown";
    auto* report = app.add_subcommand("report", "Render a report from a result index");
    report->add_option("results", report_path, "results.json written by 'run'")->required();
    report->add_option("--format", report_format, "markdown, csv, json");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        std::ostringstream o, e2;
        int code = app.exit(e, o, e2);
        out << o.str();
        err << e2.str();
        return code == 0 ? kExitOk : kExitConfig;
    }

    try {
        if (run->parsed())
            return cmd_run(run_flags, out, err);
        if (validate->parsed())
            return cmd_validate(validate_reps, validate_seed, validate_parallelism, validate_fuzz, validate_catalog,
                                out);
        if (replay->parsed())
            return cmd_replay(replay_path, replay_catalog, out, err);
        return cmd_report(report_path, report_format, out);
    } catch (const ConfigError& e) {
        err << "configuration error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const ParseError& e) {
        err << "parse error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitFailure;
    }
}

} // namespace housebot
