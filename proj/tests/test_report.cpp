// SPDX-License-Identifier: Apache-2.0
#include "housebot/errors.hpp"
#include "housebot/report.hpp"

#include <doctest.h>

#include <algorithm>
#include <random>
#include <sstream>

using namespace housebot;

namespace {

EpisodeResult synthetic(TaskKind kind, const TechniqueConfig& technique, bool success, double wait,
                        FailureReason reason = FailureReason::none, std::string model = "m") {
    EpisodeResult r;
    r.instance.params = default_params(kind);
    r.technique = technique;
    r.model = std::move(model);
    r.success = success;
    r.failure_reason = success ? FailureReason::none
                               : (reason == FailureReason::none ? FailureReason::exited_target_unmet : reason);
    r.agent_wait_s = wait;
    return r;
}

std::vector<EpisodeResult> mixed_set() {
    std::vector<EpisodeResult> results;
    std::mt19937 gen{3};
    std::uniform_real_distribution<double> wait{0.1, 30.0};
    for (const auto& preset : technique_presets()) {
        for (auto kind : kAllTaskKinds) {
            for (int i = 0; i < 7; ++i) {
                bool ok = (i + static_cast<int>(kind)) % 3 != 0;
                auto reason = i == 6 ? FailureReason::infrastructure_error : FailureReason::none;
                results.push_back(synthetic(kind, preset.config, ok && i != 6, wait(gen), reason));
            }
        }
    }
    return results;
}

} // namespace

TEST_CASE("success rate over a known composition") {
    std::vector<EpisodeResult> results;
    for (int i = 0; i < 50; ++i)
        results.push_back(synthetic(TaskKind::fetch, TechniqueConfig{}, i < 10, 2.0));
    auto cells = aggregate(results);
    REQUIRE(cells.size() == 1);
    CHECK(cells[0].n == 50);
    CHECK(cells[0].successes == 10);
    CHECK(*cells[0].success_rate == 0.2);
    CHECK(*cells[0].mean_time_all == doctest::Approx(2.0));
}

TEST_CASE("infrastructure failures leave the denominator") {
    std::vector<EpisodeResult> results;
    for (int i = 0; i < 50; ++i) {
        auto reason = i < 2 ? FailureReason::infrastructure_error : FailureReason::none;
        results.push_back(synthetic(TaskKind::equals, TechniqueConfig{}, i >= 2 && i < 26, 1.0, reason));
    }
    auto cell = aggregate(results).front();
    CHECK(cell.infrastructure_failures == 2);
    CHECK(*cell.success_rate == 24.0 / 48.0);
}

TEST_CASE("mean times over all runs and over successes") {
    std::vector<EpisodeResult> results{synthetic(TaskKind::fetch, {}, true, 1.0), synthetic(TaskKind::fetch, {}, false, 3.0)};
    auto cell = aggregate(results).front();
    CHECK(*cell.mean_time_all == 2.0);
    CHECK(*cell.mean_time_success == 1.0);

    auto none = aggregate({synthetic(TaskKind::fetch, {}, false, 3.0)}).front();
    CHECK_FALSE(none.mean_time_success);
    auto infra = aggregate({synthetic(TaskKind::fetch, {}, false, 0.0, FailureReason::infrastructure_error)}).front();
    CHECK_FALSE(infra.success_rate);
    CHECK_FALSE(infra.mean_time_all);
}

TEST_CASE("aggregate ignores input order") {
    auto results = mixed_set();
    auto expected = aggregate(results);
    std::mt19937 gen{9};
    for (int i = 0; i < 5; ++i) {
        std::shuffle(results.begin(), results.end(), gen);
        CHECK(aggregate(results) == expected);
    }
}

TEST_CASE("aggregate orders by task and table row") {
    auto cells = aggregate(mixed_set());
    REQUIRE(cells.size() == 36);
    for (std::size_t i = 1; i < cells.size(); ++i) {
        auto a = std::pair{static_cast<int>(cells[i - 1].kind), technique_rank(cells[i - 1].technique)};
        auto b = std::pair{static_cast<int>(cells[i].kind), technique_rank(cells[i].technique)};
        CHECK(a < b);
    }
    CHECK_THROWS_AS(aggregate({}), std::invalid_argument);
}

TEST_CASE("csv and json are lossless") {
    auto cells = aggregate(mixed_set());
    CHECK(parse_csv_report(render(cells, ReportFormat::csv)) == cells);
    CHECK(parse_json_report(render(cells, ReportFormat::json)) == cells);
    CHECK(render(cells, ReportFormat::csv).rfind(
              "model,task,technique,n,successes,success_rate,mean_time_all_s,mean_time_success_s,infra_failures\n", 0) ==
          0);
}

TEST_CASE("markdown table shape") {
    auto md = render(aggregate(mixed_set()), ReportFormat::markdown);
    CHECK(md.find("| Prompting Technique | Fetch success rate | Fetch mean time [s] | Conditional success rate | "
                  "Conditional mean time [s] | Equals success rate | Equals mean time [s] | Distribute success rate | "
                  "Distribute mean time [s] |") != std::string::npos);
    std::size_t last = 0;
    for (const auto& preset : technique_presets()) {
        auto pos = md.find("\n| " + preset.config.label() + " |");
        REQUIRE(pos != std::string::npos);
        CHECK(pos > last);
        last = pos;
    }
}

TEST_CASE("two-decimal rounding is half up") {
    CHECK(format_two_decimals(0.125) == "0.13");
    CHECK(format_two_decimals(0.135) == "0.14");
    CHECK(format_two_decimals(0.2) == "0.20");
    CHECK(format_two_decimals(1.0) == "1.00");
    CHECK(format_two_decimals(0.72) == "0.72");
    CHECK(format_two_decimals(12.345) == "12.35");
    CHECK(format_two_decimals(0.0) == "0.00");
}

TEST_CASE("report formats") {
    CHECK(parse_report_format("md") == ReportFormat::markdown);
    CHECK(parse_report_format("csv") == ReportFormat::csv);
    CHECK_THROWS_AS(parse_report_format("xlsx"), ConfigError);
    CHECK_THROWS_AS(parse_csv_report("model,task\nx"), ParseError);
    CHECK_THROWS_AS(parse_json_report("{"), ParseError);
}
