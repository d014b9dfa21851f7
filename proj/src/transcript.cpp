// SPDX-License-Identifier: Apache-2.0
#include "housebot/transcript.hpp"

#include "housebot/errors.hpp"

#include <fstream>
#include <sstream>

namespace housebot {

namespace {

FailureReason reason_field(const json& j) {
    auto name = j.at("failure_reason").get<std::string>();
    auto reason = parse_failure_reason(name);
    if (!reason)
        throw ParseError("unknown failure reason '" + name + "'");
    return *reason;
}

void read_outcome(const json& j, EpisodeResult& result) {
    result.success = j.at("success").get<bool>();
    result.failure_reason = reason_field(j);
    result.calls_used = j.at("calls_used").get<int>();
    result.turns = j.value("turns", 0);
    result.agent_wait_s = j.at("agent_wait_s").get<double>();
    result.error = j.value("error", std::string{});
}

json outcome(const EpisodeResult& result) {
    return json{
        {"success", result.success},
        {"failure_reason", std::string{to_string(result.failure_reason)}},
        {"calls_used", result.calls_used},
        {"turns", result.turns},
        {"agent_wait_s", result.agent_wait_s},
        {"error", result.error},
    };
}

} // namespace

std::string transcript_jsonl(const EpisodeResult& result, std::string_view experiment) {
    std::string out;
    json header{
        {"type", "header"},
        {"format", std::string{kTranscriptFormat}},
        {"experiment", std::string{experiment}},
        {"model", result.model},
        {"temperature", result.temperature},
        {"technique", result.technique},
        {"technique_label", result.technique.label()},
        {"instance", result.instance},
    };
    out += header.dump() + "\n";
    for (const auto& message : result.transcript) {
        json line = message;
        line["type"] = "message";
        out += line.dump() + "\n";
    }
    json tail = outcome(result);
    tail["type"] = "result";
    out += tail.dump() + "\n";
    return out;
}

RecordedEpisode parse_transcript_jsonl(std::string_view text) {
    RecordedEpisode recorded;
    std::istringstream in{std::string{text}};
    std::string line;
    int line_no = 0;
    bool have_header = false;
    bool have_result = false;
    try {
        while (std::getline(in, line)) {
            ++line_no;
            if (line.empty())
                continue;
            if (have_result)
                throw ParseError("content after the result line");
            auto j = json::parse(line, nullptr, false);
            if (j.is_discarded() || !j.is_object() || !j.contains("type"))
                throw ParseError("not a transcript record");
            auto type = j.at("type").get<std::string>();
            if (!have_header) {
                if (type != "header" || j.value("format", std::string{}) != kTranscriptFormat)
                    throw ParseError("transcript must start with a header record");
                recorded.experiment = j.at("experiment").get<std::string>();
                recorded.result.model = j.at("model").get<std::string>();
                recorded.result.temperature = j.at("temperature").get<double>();
                recorded.result.technique = j.at("technique").get<TechniqueConfig>();
                recorded.result.instance = j.at("instance").get<TaskInstance>();
                have_header = true;
            } else if (type == "message") {
                recorded.result.transcript.push_back(j.get<Message>());
            } else if (type == "result") {
                read_outcome(j, recorded.result);
                have_result = true;
            } else {
                throw ParseError("unknown record type '" + type + "'");
            }
        }
    } catch (const ParseError& e) {
        throw ParseError("transcript line " + std::to_string(line_no) + ": " + e.what());
    } catch (const json::exception& e) {
        throw ParseError("transcript line " + std::to_string(line_no) + ": " + e.what());
    }
    if (!have_header || !have_result)
        throw ParseError("transcript is truncated: missing " + std::string{have_header ? "result" : "header"} + " record");
    return recorded;
}

RecordedEpisode load_transcript(const std::filesystem::path& path) { return parse_transcript_jsonl(read_file(path)); }

std::filesystem::path transcript_path(const std::filesystem::path& root, std::string_view experiment,
                                      std::string_view backend_label, const EpisodeResult& result) {
    auto dir = root / std::string{experiment};
    if (!backend_label.empty())
        dir /= std::string{backend_label};
    std::string kind{to_string(result.kind())};
    for (auto& c : kind)
        c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return dir / kind / result.technique.slug() / (std::to_string(result.seed()) + ".jsonl");
}

json result_row(const EpisodeResult& result) {
    json row = outcome(result);
    row["model"] = result.model;
    row["temperature"] = result.temperature;
    row["task"] = std::string{to_string(result.kind())};
    row["seed"] = result.seed();
    row["technique"] = result.technique;
    row["technique_label"] = result.technique.label();
    return row;
}

EpisodeResult parse_result_row(const json& row) {
    EpisodeResult result;
    try {
        result.model = row.at("model").get<std::string>();
        result.temperature = row.at("temperature").get<double>();
        result.instance.params = default_params(parse_task_kind(row.at("task").get<std::string>()));
        result.instance.seed = row.at("seed").get<std::uint64_t>();
        result.technique = row.at("technique").get<TechniqueConfig>();
        read_outcome(row, result);
    } catch (const json::exception& e) {
        throw ParseError(std::string{"result row: "} + e.what());
    } catch (const ConfigError& e) {
        throw ParseError(std::string{"result row: "} + e.what());
    }
    return result;
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in{path, std::ios::binary};
    if (!in)
        throw ParseError("cannot open " + path.string());
    std::stringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

void write_file(const std::filesystem::path& path, std::string_view content) {
    if (path.has_parent_path())
        std::filesystem::create_directories(path.parent_path());
    std::ofstream out{path, std::ios::binary | std::ios::trunc};
    if (!out)
        throw ConfigError("cannot write " + path.string());
    out << content;
}

} // namespace housebot
