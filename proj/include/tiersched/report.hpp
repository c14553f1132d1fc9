#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "tiersched/types.hpp"

namespace tiersched {

/// One experiment cell (strategy x replication x reporting entity).
/// `waiting` columns are cost-weighted waiting totals, `violation` columns
/// cost-weighted deadline-overrun totals; the `penalty` columns hold the
/// saturating-curve totals. Stream scenarios report realized values,
/// snapshot scenarios the frozen-state estimates.
struct ReportRow {
    std::string strategy;
    int replication = 0;
    std::uint64_t seed = 0;
    std::string entity;
    int jobs = 0;
    double initial_waiting = 0.0;
    double initial_violation = 0.0;
    double initial_penalty_waiting = 0.0;
    double initial_penalty_sla = 0.0;
    double enhanced_waiting = 0.0;
    double enhanced_violation = 0.0;
    double enhanced_penalty_waiting = 0.0;
    double enhanced_penalty_sla = 0.0;
    double improvement_waiting_pct = 0.0;
    double improvement_violation_pct = 0.0;
    double improvement_penalty_waiting_pct = 0.0;
    double improvement_penalty_sla_pct = 0.0;
    std::string error;  // set when the cell aborted

    bool operator==(const ReportRow&) const = default;
};

struct ReportConvergence {
    std::string strategy;
    int replication = 0;
    std::string label;
    TimeUnits epoch_time = 0;
    std::vector<double> best;
    std::vector<double> mean;

    bool operator==(const ReportConvergence&) const = default;
};

struct Report {
    int schema_version = 1;
    std::string scenario_name;
    std::uint64_t base_seed = 0;
    std::vector<ReportRow> rows;
    std::vector<ReportConvergence> convergence;

    bool operator==(const Report&) const = default;
};

/// improvement% convention: (initial - enhanced) / initial * 100.
double improvement_pct(double initial, double enhanced);

enum class ReportFormat { csv, jsonl };
ReportFormat report_format_from_name(const std::string& name);

/// Serialized report. csv carries the rows; jsonl additionally round-trips
/// the convergence series. Column reference lives in docs/formats.md.
std::string emit_report(const Report& report, ReportFormat format);
Report parse_report(const std::string& text, ReportFormat format);

/// Tab-separated dump of the convergence series, one record per generation.
std::string convergence_to_text(const Report& report);

void write_report(const Report& report, const std::filesystem::path& path, ReportFormat format);
Report read_report(const std::filesystem::path& path);

/// Cross-strategy ranking over paired replications.
enum class Metric { waiting, violation, penalty_waiting, penalty_sla };
Metric metric_from_name(const std::string& name);
const char* to_string(Metric metric);

struct StrategyStats {
    std::string strategy;
    int replications = 0;
    double mean = 0.0;
};

struct PairwiseTest {
    std::string better;  // lower mean
    std::string worse;
    int wins = 0;  // replications where `better` beat `worse`
    int ties = 0;
    int n = 0;             // paired replications
    double p_value = 1.0;  // one-sided sign test for "better < worse"
};

struct CompareResult {
    Metric metric = Metric::waiting;
    std::vector<StrategyStats> ranked;  // ascending mean (best first)
    std::vector<PairwiseTest> tests;    // adjacent ranks
    std::vector<std::string> expected_order;
    bool expected_order_holds = true;

    std::string to_text() const;
};

/// Ranks strategies by their mean enhanced system metric and attaches
/// adjacent sign tests. Requires >= 2 strategies and >= 10 replications.
/// When `expected_order` is given (strategy spec strings, best first), the
/// result flags whether the observed mean ranking is consistent with it.
CompareResult compare_strategies(const Report& report, Metric metric,
                                 const std::vector<std::string>& expected_order = {});

/// Exact one-sided binomial tail: P[X >= wins] for X ~ Bin(n, 1/2).
double sign_test_p(int wins, int n);

}  // namespace tiersched
