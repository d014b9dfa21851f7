// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "housebot/json_io.hpp"
#include "housebot/runner.hpp"

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace housebot {

inline constexpr std::string_view kTranscriptFormat = "housebot-transcript/1";
inline constexpr std::string_view kResultsFormat = "housebot-results/1";

/// An episode read back from its JSONL log.
struct RecordedEpisode {
    std::string experiment;
    EpisodeResult result;
};

/// One JSON object per line: a header with the instance and technique, one
/// line per message, and a closing result line.
std::string transcript_jsonl(const EpisodeResult& result, std::string_view experiment);

/// Throws ParseError for malformed or truncated input.
RecordedEpisode parse_transcript_jsonl(std::string_view text);
RecordedEpisode load_transcript(const std::filesystem::path& path);

/// `<root>/<experiment>/<kind>/<technique>/<seed>.jsonl`; with more than one
/// backend the backend label is inserted after the experiment.
std::filesystem::path transcript_path(const std::filesystem::path& root, std::string_view experiment,
                                      std::string_view backend_label, const EpisodeResult& result);

/// Result row without the transcript.
json result_row(const EpisodeResult& result);
EpisodeResult parse_result_row(const json& row);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view content);

} // namespace housebot
