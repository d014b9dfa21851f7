// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "housebot/runner.hpp"

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace housebot {

struct CellSummary {
    std::string model;
    TaskKind kind = TaskKind::fetch;
    TechniqueConfig technique;
    int n = 0;
    int successes = 0;
    int infrastructure_failures = 0;
    std::optional<double> success_rate;       // successes / (n - infrastructure_failures)
    std::optional<double> mean_time_all;      // seconds, over runs without infrastructure failure
    std::optional<double> mean_time_success;  // seconds, over successful runs

    bool operator==(const CellSummary&) const = default;
};

/// One summary per (model, kind, technique), ordered by model, then task in
/// table order, then technique in table order. Throws std::invalid_argument
/// for an empty input.
std::vector<CellSummary> aggregate(const std::vector<EpisodeResult>& results);

enum class ReportFormat { csv, json, markdown };

/// Throws ConfigError for unknown names.
ReportFormat parse_report_format(std::string_view name);

std::string render(const std::vector<CellSummary>& summaries, ReportFormat format);

/// Two decimals, rounding half up.
std::string format_two_decimals(double value);

std::vector<CellSummary> parse_csv_report(std::string_view text);
std::vector<CellSummary> parse_json_report(std::string_view text);

} // namespace housebot
