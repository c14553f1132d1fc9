#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "tiersched/bench.hpp"

using namespace tiersched;

namespace {

constexpr const char* kSnapshotScenario = R"json({
  "name": "snap",
  "workload": {
    "n_tiers": 1, "n_resources": 3, "n_jobs": 25, "seed": 11,
    "arrival": "batch", "exec_time": [10, 500],
    "cost_mean": 1000.0, "cost_var": 25.0, "allowance_slack": [0.1, 1.0]
  },
  "strategies": ["fcfs", "ga:tier:waiting"],
  "ga": {"population": 10, "generations": 1000, "crossover_rate": 0.1,
         "mutation_rate": 0.1, "seed": 3},
  "penalty": {"chi": 1.0, "nu": 1e-5, "differentiated": true},
  "mode": "snapshot",
  "replications": 3
})json";

}  // namespace

TEST_CASE("strategy specs parse and reject garbage") {
    const StrategySpec wlc = StrategySpec::parse("wlc");
    CHECK(wlc.kind == StrategySpec::Kind::baseline);
    CHECK(wlc.baseline == BaselinePolicy::wlc);

    const StrategySpec ga = StrategySpec::parse("ga:system:sla_tier_allowance:nondiff");
    CHECK(ga.kind == StrategySpec::Kind::ga);
    CHECK(ga.layout == StrategySpec::Layout::system);
    CHECK(ga.fitness == FitnessKind::sla_tier_allowance);
    REQUIRE(ga.differentiated.has_value());
    CHECK_FALSE(*ga.differentiated);

    CHECK_THROWS_AS((void)StrategySpec::parse("ga:tier"), InvariantError);
    CHECK_THROWS_AS((void)StrategySpec::parse("ga:blob:waiting"), InvariantError);
    CHECK_THROWS_AS((void)StrategySpec::parse("lifo"), InvariantError);
    CHECK_THROWS_AS((void)StrategySpec::parse("fcfs:fast"), InvariantError);
}

TEST_CASE("scenarios reject unknown keys") {
    CHECK_THROWS_AS((void)Scenario::from_json_text(R"({"strategies": ["fcfs"], "typo": 1})"),
                    InvariantError);
    CHECK_THROWS_AS((void)Scenario::from_json_text(
                        R"({"workload": {"n_tiers": 1, "n_rezources": 3}, "strategies": ["fcfs"]})"),
                    InvariantError);
}

TEST_CASE("a dispatch-only strategy shows zero improvement") {
    Scenario scenario = Scenario::from_json_text(kSnapshotScenario);
    scenario.strategies = {StrategySpec::parse("fcfs")};
    scenario.replications = 2;
    const Report report = run_scenario(scenario);
    REQUIRE_FALSE(report.rows.empty());
    for (const ReportRow& row : report.rows) {
        CHECK(row.error.empty());
        CHECK(row.enhanced_waiting == row.initial_waiting);
        CHECK(row.improvement_waiting_pct == 0.0);
    }
}

TEST_CASE("the tier GA clears the improvement bar on a backlog") {
    Scenario scenario = Scenario::from_json_text(kSnapshotScenario);
    scenario.replications = 2;
    const Report report = run_scenario(scenario);
    int checked = 0;
    for (const ReportRow& row : report.rows) {
        if (row.strategy != "ga:tier:waiting" || row.entity != "system") continue;
        CHECK(row.error.empty());
        CHECK(row.improvement_waiting_pct >= 20.0);
        ++checked;
    }
    CHECK(checked == 2);
}

TEST_CASE("rescheduling a frozen backlog never regresses") {
    // the incumbent seeds the population, so the enhanced snapshot scores
    // at most the initial ones
    Scenario scenario = Scenario::from_json_text(kSnapshotScenario);
    scenario.replications = 4;
    scenario.ga.generations = 50;
    const Report report = run_scenario(scenario);
    for (const ReportRow& row : report.rows) {
        if (row.strategy == "fcfs" || row.entity != "system") continue;
        CHECK(row.enhanced_waiting <= row.initial_waiting);
    }
}

TEST_CASE("scenario runs replay byte for byte") {
    Scenario scenario = Scenario::from_json_text(kSnapshotScenario);
    scenario.replications = 2;
    scenario.ga.generations = 150;
    const Report a = run_scenario(scenario);
    const Report b = run_scenario(scenario);
    CHECK(emit_report(a, ReportFormat::jsonl) == emit_report(b, ReportFormat::jsonl));
    CHECK(emit_report(a, ReportFormat::csv) == emit_report(b, ReportFormat::csv));
}

TEST_CASE("reports round-trip through both formats") {
    Scenario scenario = Scenario::from_json_text(kSnapshotScenario);
    scenario.replications = 2;
    scenario.ga.generations = 60;
    const Report report = run_scenario(scenario);

    SUBCASE("jsonl carries everything") {
        const std::string text = emit_report(report, ReportFormat::jsonl);
        const Report parsed = parse_report(text, ReportFormat::jsonl);
        CHECK(parsed == report);
        CHECK(emit_report(parsed, ReportFormat::jsonl) == text);
    }
    SUBCASE("csv carries the rows") {
        const std::string text = emit_report(report, ReportFormat::csv);
        const Report parsed = parse_report(text, ReportFormat::csv);
        CHECK(parsed.rows == report.rows);
        CHECK(parsed.scenario_name == report.scenario_name);
    }
    SUBCASE("an empty report is a bare header") {
        Report empty;
        empty.scenario_name = "nothing";
        const std::string csv = emit_report(empty, ReportFormat::csv);
        CHECK(parse_report(csv, ReportFormat::csv).rows.empty());
        const std::string jsonl = emit_report(empty, ReportFormat::jsonl);
        CHECK(parse_report(jsonl, ReportFormat::jsonl) == empty);
    }
}

TEST_CASE("convergence series export one record per generation") {
    Report report;
    report.convergence.push_back({"ga:tier:waiting", 2, "tier 1", 40, {9.0, 7.0, 7.0}, {11.0, 9.5, 8.0}});
    const std::string text = convergence_to_text(report);
    std::istringstream in(text);
    std::string line;
    std::getline(in, line);
    CHECK(line == "tiersched-convergence v1");
    std::getline(in, line);  // column header
    int records = 0;
    while (std::getline(in, line)) {
        CHECK(line.find("ga:tier:waiting\t2\ttier 1\t40\t") == 0);
        ++records;
    }
    CHECK(records == 3);
}

TEST_CASE("improvement columns recompute from their inputs") {
    Scenario scenario = Scenario::from_json_text(kSnapshotScenario);
    scenario.replications = 2;
    scenario.ga.generations = 80;
    const Report report = run_scenario(scenario);
    for (const ReportRow& row : report.rows) {
        if (!row.error.empty()) continue;
        const double again = improvement_pct(row.initial_waiting, row.enhanced_waiting);
        CHECK(std::abs(again - row.improvement_waiting_pct) <= 0.01);
    }
}

TEST_CASE("comparison ranks by mean and ties duplicates") {
    Report report;
    for (int rep = 0; rep < 12; ++rep) {
        for (const char* name : {"a", "a-again", "b"}) {
            ReportRow row;
            row.strategy = name;
            row.replication = rep;
            row.entity = "system";
            row.enhanced_waiting = name[0] == 'b' ? 200.0 + rep : 100.0 + rep;
            report.rows.push_back(row);
        }
    }
    const CompareResult result = compare_strategies(report, Metric::waiting, {"a", "b"});
    REQUIRE(result.ranked.size() == 3);
    CHECK(result.ranked[0].mean == result.ranked[1].mean);
    CHECK(result.ranked[2].strategy == "b");
    CHECK(result.expected_order_holds);
    // the duplicate pair never beats itself; the sign test stays flat
    CHECK(result.tests.front().p_value == doctest::Approx(1.0));
    // 12 straight wins against b
    CHECK(result.tests.back().wins == 12);
    CHECK(result.tests.back().p_value == doctest::Approx(std::pow(0.5, 12)));
}

TEST_CASE("comparison demands enough replications") {
    Report report;
    for (int rep = 0; rep < 5; ++rep)
        for (const char* name : {"a", "b"}) {
            ReportRow row;
            row.strategy = name;
            row.replication = rep;
            row.entity = "system";
            report.rows.push_back(row);
        }
    CHECK_THROWS_AS((void)compare_strategies(report, Metric::waiting), InvariantError);
}

TEST_CASE("sign test tail probabilities") {
    CHECK(sign_test_p(0, 10) == doctest::Approx(1.0));
    CHECK(sign_test_p(10, 10) == doctest::Approx(std::pow(0.5, 10)));
    CHECK(sign_test_p(8, 10) == doctest::Approx((45.0 + 10.0 + 1.0) / 1024.0));
    CHECK(sign_test_p(0, 0) == doctest::Approx(1.0));
}

TEST_CASE("failing cells are recorded, not fatal") {
    Scenario scenario = Scenario::from_json_text(kSnapshotScenario);
    scenario.replications = 1;
    scenario.mode = Scenario::Mode::snapshot;
    scenario.backlog_target = 1000;  // a batch stream can never reach this backlog
    scenario.workload.arrival = ArrivalProcess::poisson;
    scenario.workload.arrival_rate = 0.5;
    scenario.workload.n_jobs = 10;  // drains long before 1000 pending
    const Report report = run_scenario(scenario);
    REQUIRE_FALSE(report.rows.empty());
    for (const ReportRow& row : report.rows) CHECK_FALSE(row.error.empty());
}
