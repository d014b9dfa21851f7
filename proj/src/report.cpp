// SPDX-License-Identifier: Apache-2.0
#include "housebot/report.hpp"

#include "housebot/errors.hpp"
#include "housebot/json_io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <tuple>

namespace housebot {

namespace {

constexpr std::string_view kCsvHeader =
    "model,task,technique,n,successes,success_rate,mean_time_all_s,mean_time_success_s,infra_failures";

std::string full_precision(double value) {
    char buffer[32];
    std::snprintf(buffer, sizeof buffer, "%.17g", value);
    return buffer;
}

std::string optional_number(const std::optional<double>& value) { return value ? full_precision(*value) : ""; }

std::string csv_field(const std::string& value) {
    if (value.find_first_of(",\"\n") == std::string::npos)
        return value;
    std::string out = "\"";
    for (char c : value) {
        if (c == '"')
            out += '"';
        out += c;
    }
    return out + "\"";
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields(1);
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        char c = line[i];
        if (quoted) {
            if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
                fields.back() += '"';
                ++i;
            } else if (c == '"') {
                quoted = false;
            } else {
                fields.back() += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            fields.emplace_back();
        } else {
            fields.back() += c;
        }
    }
    return fields;
}

std::optional<double> parse_optional(const std::string& text) {
    if (text.empty())
        return std::nullopt;
    return std::stod(text);
}

json to_json_value(const std::optional<double>& value) { return value ? json(*value) : json(nullptr); }

std::optional<double> from_json_value(const json& value) {
    if (value.is_null())
        return std::nullopt;
    return value.get<double>();
}

double sorted_sum(std::vector<double> values) {
    // Summing in sorted order makes the result independent of input order.
    std::sort(values.begin(), values.end());
    return std::accumulate(values.begin(), values.end(), 0.0);
}

} // namespace

std::vector<CellSummary> aggregate(const std::vector<EpisodeResult>& results) {
    if (results.empty())
        throw std::invalid_argument("cannot build a report from an empty result set");

    struct Accumulator {
        CellSummary summary;
        std::vector<double> times_all;
        std::vector<double> times_success;
    };
    using Key = std::tuple<std::string, int, int, std::string>;
    std::map<Key, Accumulator> cells;

    for (const auto& r : results) {
        Key key{r.model, static_cast<int>(r.kind()), technique_rank(r.technique), r.technique.label()};
        auto& cell = cells[key];
        cell.summary.model = r.model;
        cell.summary.kind = r.kind();
        cell.summary.technique = r.technique;
        ++cell.summary.n;
        if (r.failure_reason == FailureReason::infrastructure_error) {
            ++cell.summary.infrastructure_failures;
            continue;
        }
        cell.times_all.push_back(r.agent_wait_s);
        if (r.success) {
            ++cell.summary.successes;
            cell.times_success.push_back(r.agent_wait_s);
        }
    }

    std::vector<CellSummary> out;
    out.reserve(cells.size());
    for (auto& [key, cell] : cells) {
        auto& s = cell.summary;
        int valid = s.n - s.infrastructure_failures;
        if (valid > 0) {
            s.success_rate = static_cast<double>(s.successes) / valid;
            s.mean_time_all = sorted_sum(cell.times_all) / valid;
        }
        if (!cell.times_success.empty())
            s.mean_time_success = sorted_sum(cell.times_success) / static_cast<double>(cell.times_success.size());
        out.push_back(s);
    }
    return out;
}

ReportFormat parse_report_format(std::string_view name) {
    if (name == "csv")
        return ReportFormat::csv;
    if (name == "json")
        return ReportFormat::json;
    if (name == "markdown" || name == "md")
        return ReportFormat::markdown;
    throw ConfigError("unknown report format '" + std::string{name} + "' (expected csv, json or markdown)");
}

std::string format_two_decimals(double value) {
    // The small nudge absorbs binary representation error, so 0.125 and
    // 0.145 (stored as 0.14499...) both round up.
    auto hundredths = static_cast<long long>(std::floor(value * 100.0 + 0.5 + 1e-9));
    bool negative = hundredths < 0;
    auto magnitude = negative ? -hundredths : hundredths;
    char buffer[48];
    std::snprintf(buffer, sizeof buffer, "%s%lld.%02lld", negative ? "-" : "", magnitude / 100, magnitude % 100);
    return buffer;
}

std::string render(const std::vector<CellSummary>& summaries, ReportFormat format) {
    std::ostringstream out;
    switch (format) {
    case ReportFormat::csv:
        out << kCsvHeader << "\n";
        for (const auto& s : summaries) {
            out << csv_field(s.model) << ',' << to_string(s.kind) << ',' << csv_field(s.technique.label()) << ','
                << s.n << ',' << s.successes << ',' << optional_number(s.success_rate) << ','
                << optional_number(s.mean_time_all) << ',' << optional_number(s.mean_time_success) << ','
                << s.infrastructure_failures << "\n";
        }
        break;
    case ReportFormat::json: {
        json array = json::array();
        for (const auto& s : summaries) {
            array.push_back(json{
                {"model", s.model},
                {"task", std::string{to_string(s.kind)}},
                {"technique", s.technique.label()},
                {"n", s.n},
                {"successes", s.successes},
                {"success_rate", to_json_value(s.success_rate)},
                {"mean_time_all_s", to_json_value(s.mean_time_all)},
                {"mean_time_success_s", to_json_value(s.mean_time_success)},
                {"infra_failures", s.infrastructure_failures},
            });
        }
        out << array.dump(2) << "\n";
        break;
    }
    case ReportFormat::markdown: {
        std::vector<std::string> models;
        for (const auto& s : summaries) {
            if (std::find(models.begin(), models.end(), s.model) == models.end())
                models.push_back(s.model);
        }
        for (const auto& model : models) {
            std::vector<TechniqueConfig> techniques;
            std::map<std::pair<std::string, int>, const CellSummary*> cell;
            for (const auto& s : summaries) {
                if (s.model != model)
                    continue;
                if (std::find(techniques.begin(), techniques.end(), s.technique) == techniques.end())
                    techniques.push_back(s.technique);
                cell[{s.technique.label(), static_cast<int>(s.kind)}] = &s;
            }
            std::stable_sort(techniques.begin(), techniques.end(), [](const auto& a, const auto& b) {
                return std::pair{technique_rank(a), a.label()} < std::pair{technique_rank(b), b.label()};
            });

            out << "### " << model << "\n\n| Prompting Technique |";
            for (auto kind : kAllTaskKinds)
                out << ' ' << to_string(kind) << " success rate | " << to_string(kind) << " mean time [s] |";
            out << "\n|---|";
            for (std::size_t i = 0; i < kAllTaskKinds.size(); ++i)
                out << "---:|---:|";
            out << "\n";

            std::vector<std::string> infra_notes;
            for (const auto& technique : techniques) {
                out << "| " << technique.label() << " |";
                for (auto kind : kAllTaskKinds) {
                    auto it = cell.find({technique.label(), static_cast<int>(kind)});
                    if (it == cell.end()) {
                        out << " - | - |";
                        continue;
                    }
                    const CellSummary& s = *it->second;
                    out << ' ' << (s.success_rate ? format_two_decimals(*s.success_rate) : "n/a") << " | "
                        << (s.mean_time_all ? format_two_decimals(*s.mean_time_all) : "n/a") << " |";
                    if (s.infrastructure_failures > 0)
                        infra_notes.push_back(std::string{to_string(kind)} + " / " + technique.label() + ": " +
                                              std::to_string(s.infrastructure_failures) + " of " +
                                              std::to_string(s.n));
                }
                out << "\n";
            }
            if (!infra_notes.empty()) {
                out << "\nInfrastructure failures (excluded from success rates and times):\n";
                for (const auto& note : infra_notes)
                    out << "- " << note << "\n";
            }
            out << "\n";
        }
        break;
    }
    }
    return out.str();
}

std::vector<CellSummary> parse_csv_report(std::string_view text) {
    std::istringstream in{std::string{text}};
    std::string line;
    if (!std::getline(in, line) || line != kCsvHeader)
        throw ParseError("csv report: unexpected header");
    std::vector<CellSummary> out;
    while (std::getline(in, line)) {
        if (line.empty())
            continue;
        auto f = split_csv_line(line);
        if (f.size() != 9)
            throw ParseError("csv report: expected 9 fields, got " + std::to_string(f.size()));
        try {
            CellSummary s;
            s.model = f[0];
            s.kind = parse_task_kind(f[1]);
            s.technique = parse_technique(f[2]);
            s.n = std::stoi(f[3]);
            s.successes = std::stoi(f[4]);
            s.success_rate = parse_optional(f[5]);
            s.mean_time_all = parse_optional(f[6]);
            s.mean_time_success = parse_optional(f[7]);
            s.infrastructure_failures = std::stoi(f[8]);
            out.push_back(std::move(s));
        } catch (const ConfigError& e) {
            throw ParseError(std::string{"csv report: "} + e.what());
        } catch (const std::logic_error& e) {
            throw ParseError(std::string{"csv report: "} + e.what());
        }
    }
    return out;
}

std::vector<CellSummary> parse_json_report(std::string_view text) {
    std::vector<CellSummary> out;
    try {
        for (const auto& j : json::parse(text)) {
            CellSummary s;
            s.model = j.at("model").get<std::string>();
            s.kind = parse_task_kind(j.at("task").get<std::string>());
            s.technique = parse_technique(j.at("technique").get<std::string>());
            s.n = j.at("n").get<int>();
            s.successes = j.at("successes").get<int>();
            s.success_rate = from_json_value(j.at("success_rate"));
            s.mean_time_all = from_json_value(j.at("mean_time_all_s"));
            s.mean_time_success = from_json_value(j.at("mean_time_success_s"));
            s.infrastructure_failures = j.at("infra_failures").get<int>();
            out.push_back(std::move(s));
        }
    } catch (const json::exception& e) {
        throw ParseError(std::string{"json report: "} + e.what());
    } catch (const ConfigError& e) {
        throw ParseError(std::string{"json report: "} + e.what());
    }
    return out;
}

} // namespace housebot
