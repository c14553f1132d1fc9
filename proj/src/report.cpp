#include "tiersched/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "json.hpp"

namespace tiersched {

namespace {

using nlohmann::json;

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

constexpr const char* kCsvHeader =
    "strategy,replication,seed,entity,jobs,"
    "initial_waiting,initial_violation,initial_penalty_waiting,initial_penalty_sla,"
    "enhanced_waiting,enhanced_violation,enhanced_penalty_waiting,enhanced_penalty_sla,"
    "improvement_waiting_pct,improvement_violation_pct,improvement_penalty_waiting_pct,"
    "improvement_penalty_sla_pct,error";

std::string csv_safe(std::string s) {
    for (char& c : s)
        if (c == ',' || c == '\n') c = ';';
    return s;
}

json row_to_json(const ReportRow& r) {
    return json{{"kind", "row"},
                {"strategy", r.strategy},
                {"replication", r.replication},
                {"seed", r.seed},
                {"entity", r.entity},
                {"jobs", r.jobs},
                {"initial_waiting", r.initial_waiting},
                {"initial_violation", r.initial_violation},
                {"initial_penalty_waiting", r.initial_penalty_waiting},
                {"initial_penalty_sla", r.initial_penalty_sla},
                {"enhanced_waiting", r.enhanced_waiting},
                {"enhanced_violation", r.enhanced_violation},
                {"enhanced_penalty_waiting", r.enhanced_penalty_waiting},
                {"enhanced_penalty_sla", r.enhanced_penalty_sla},
                {"improvement_waiting_pct", r.improvement_waiting_pct},
                {"improvement_violation_pct", r.improvement_violation_pct},
                {"improvement_penalty_waiting_pct", r.improvement_penalty_waiting_pct},
                {"improvement_penalty_sla_pct", r.improvement_penalty_sla_pct},
                {"error", r.error}};
}

ReportRow row_from_json(const json& j) {
    ReportRow r;
    r.strategy = j.at("strategy").get<std::string>();
    r.replication = j.at("replication").get<int>();
    r.seed = j.at("seed").get<std::uint64_t>();
    r.entity = j.at("entity").get<std::string>();
    r.jobs = j.at("jobs").get<int>();
    r.initial_waiting = j.at("initial_waiting").get<double>();
    r.initial_violation = j.at("initial_violation").get<double>();
    r.initial_penalty_waiting = j.at("initial_penalty_waiting").get<double>();
    r.initial_penalty_sla = j.at("initial_penalty_sla").get<double>();
    r.enhanced_waiting = j.at("enhanced_waiting").get<double>();
    r.enhanced_violation = j.at("enhanced_violation").get<double>();
    r.enhanced_penalty_waiting = j.at("enhanced_penalty_waiting").get<double>();
    r.enhanced_penalty_sla = j.at("enhanced_penalty_sla").get<double>();
    r.improvement_waiting_pct = j.at("improvement_waiting_pct").get<double>();
    r.improvement_violation_pct = j.at("improvement_violation_pct").get<double>();
    r.improvement_penalty_waiting_pct = j.at("improvement_penalty_waiting_pct").get<double>();
    r.improvement_penalty_sla_pct = j.at("improvement_penalty_sla_pct").get<double>();
    r.error = j.at("error").get<std::string>();
    return r;
}

}  // namespace

double improvement_pct(double initial, double enhanced) {
    if (initial == 0.0) return 0.0;
    return (initial - enhanced) / initial * 100.0;
}

ReportFormat report_format_from_name(const std::string& name) {
    if (name == "csv") return ReportFormat::csv;
    if (name == "jsonl") return ReportFormat::jsonl;
    throw InvariantError("unknown report format '" + name + "'");
}

std::string emit_report(const Report& report, ReportFormat format) {
    std::ostringstream out;
    if (format == ReportFormat::csv) {
        out << "# tiersched-report v" << report.schema_version << " scenario="
            << csv_safe(report.scenario_name) << " base_seed=" << report.base_seed << '\n';
        out << kCsvHeader << '\n';
        for (const ReportRow& r : report.rows) {
            out << csv_safe(r.strategy) << ',' << r.replication << ',' << r.seed << ','
                << csv_safe(r.entity) << ',' << r.jobs << ',' << fmt(r.initial_waiting) << ','
                << fmt(r.initial_violation) << ',' << fmt(r.initial_penalty_waiting) << ','
                << fmt(r.initial_penalty_sla) << ',' << fmt(r.enhanced_waiting) << ','
                << fmt(r.enhanced_violation) << ',' << fmt(r.enhanced_penalty_waiting) << ','
                << fmt(r.enhanced_penalty_sla) << ',' << fmt(r.improvement_waiting_pct) << ','
                << fmt(r.improvement_violation_pct) << ','
                << fmt(r.improvement_penalty_waiting_pct) << ','
                << fmt(r.improvement_penalty_sla_pct) << ',' << csv_safe(r.error) << '\n';
        }
        return out.str();
    }
    json header{{"kind", "header"},
                {"schema_version", report.schema_version},
                {"scenario", report.scenario_name},
                {"base_seed", report.base_seed}};
    out << header.dump() << '\n';
    for (const ReportRow& r : report.rows) out << row_to_json(r).dump() << '\n';
    for (const ReportConvergence& c : report.convergence) {
        json j{{"kind", "convergence"}, {"strategy", c.strategy},
               {"replication", c.replication}, {"label", c.label},
               {"epoch_time", c.epoch_time}, {"best", c.best},
               {"mean", c.mean}};
        out << j.dump() << '\n';
    }
    return out.str();
}

namespace {

Report parse_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    Report report;
    int lineno = 0;

    if (!std::getline(in, line)) throw ParseError(1, "header", "empty report");
    ++lineno;
    {
        std::istringstream h(line);
        std::string hash, magic, version, kv;
        h >> hash >> magic >> version;
        if (hash != "#" || magic != "tiersched-report" || version.size() < 2 ||
            version[0] != 'v')
            throw ParseError(lineno, "header", "not a tiersched report");
        report.schema_version = std::stoi(version.substr(1));
        while (h >> kv) {
            const auto eq = kv.find('=');
            if (eq == std::string::npos) continue;
            const std::string key = kv.substr(0, eq);
            if (key == "scenario") report.scenario_name = kv.substr(eq + 1);
            if (key == "base_seed") report.base_seed = std::stoull(kv.substr(eq + 1));
        }
    }
    if (!std::getline(in, line) || line != kCsvHeader)
        throw ParseError(lineno + 1, "columns", "unexpected column header");
    ++lineno;

    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::vector<std::string> f;
        std::istringstream cells(line);
        std::string cell;
        while (std::getline(cells, cell, ',')) f.push_back(cell);
        if (line.back() == ',') f.push_back("");
        if (f.size() != 18)
            throw ParseError(lineno, "record",
                             "expected 18 columns, got " + std::to_string(f.size()));
        ReportRow r;
        try {
            r.strategy = f[0];
            r.replication = std::stoi(f[1]);
            r.seed = std::stoull(f[2]);
            r.entity = f[3];
            r.jobs = std::stoi(f[4]);
            r.initial_waiting = std::stod(f[5]);
            r.initial_violation = std::stod(f[6]);
            r.initial_penalty_waiting = std::stod(f[7]);
            r.initial_penalty_sla = std::stod(f[8]);
            r.enhanced_waiting = std::stod(f[9]);
            r.enhanced_violation = std::stod(f[10]);
            r.enhanced_penalty_waiting = std::stod(f[11]);
            r.enhanced_penalty_sla = std::stod(f[12]);
            r.improvement_waiting_pct = std::stod(f[13]);
            r.improvement_violation_pct = std::stod(f[14]);
            r.improvement_penalty_waiting_pct = std::stod(f[15]);
            r.improvement_penalty_sla_pct = std::stod(f[16]);
            r.error = f[17];
        } catch (const std::exception& err) {
            throw ParseError(lineno, "record", err.what());
        }
        report.rows.push_back(std::move(r));
    }
    return report;
}

Report parse_jsonl(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    Report report;
    int lineno = 0;
    bool seen_header = false;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        json j;
        try {
            j = json::parse(line);
        } catch (const json::exception& err) {
            throw ParseError(lineno, "json", err.what());
        }
        const std::string kind = j.value("kind", "");
        if (kind == "header") {
            report.schema_version = j.at("schema_version").get<int>();
            report.scenario_name = j.at("scenario").get<std::string>();
            report.base_seed = j.at("base_seed").get<std::uint64_t>();
            seen_header = true;
        } else if (kind == "row") {
            report.rows.push_back(row_from_json(j));
        } else if (kind == "convergence") {
            ReportConvergence c;
            c.strategy = j.at("strategy").get<std::string>();
            c.replication = j.at("replication").get<int>();
            c.label = j.at("label").get<std::string>();
            c.epoch_time = j.at("epoch_time").get<TimeUnits>();
            c.best = j.at("best").get<std::vector<double>>();
            c.mean = j.at("mean").get<std::vector<double>>();
            report.convergence.push_back(std::move(c));
        } else {
            throw ParseError(lineno, "kind", "unknown record kind '" + kind + "'");
        }
    }
    if (!seen_header) throw ParseError(lineno, "header", "missing header record");
    return report;
}

}  // namespace

Report parse_report(const std::string& text, ReportFormat format) {
    return format == ReportFormat::csv ? parse_csv(text) : parse_jsonl(text);
}

std::string convergence_to_text(const Report& report) {
    std::ostringstream out;
    out << "tiersched-convergence v1\n";
    out << "strategy\treplication\tlabel\tepoch_time\tgeneration\tbest\tmean\n";
    for (const ReportConvergence& c : report.convergence)
        for (std::size_t g = 0; g < c.best.size(); ++g)
            out << c.strategy << '\t' << c.replication << '\t' << c.label << '\t' << c.epoch_time
                << '\t' << g << '\t' << fmt(c.best[g]) << '\t'
                << fmt(g < c.mean.size() ? c.mean[g] : 0.0) << '\n';
    return out.str();
}

void write_report(const Report& report, const std::filesystem::path& path, ReportFormat format) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InvariantError("cannot open '" + path.string() + "' for writing");
    out << emit_report(report, format);
    if (!out) throw InvariantError("write failed for '" + path.string() + "'");
}

Report read_report(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InvariantError("cannot open '" + path.string() + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    const std::string text = buf.str();
    const ReportFormat format =
        path.extension() == ".csv" || text.rfind("#", 0) == 0 ? ReportFormat::csv
                                                              : ReportFormat::jsonl;
    return parse_report(text, format);
}

Metric metric_from_name(const std::string& name) {
    if (name == "waiting") return Metric::waiting;
    if (name == "violation") return Metric::violation;
    if (name == "penalty-waiting") return Metric::penalty_waiting;
    if (name == "penalty-sla") return Metric::penalty_sla;
    throw InvariantError("unknown metric '" + name + "'");
}

const char* to_string(Metric metric) {
    switch (metric) {
        case Metric::waiting: return "waiting";
        case Metric::violation: return "violation";
        case Metric::penalty_waiting: return "penalty-waiting";
        case Metric::penalty_sla: return "penalty-sla";
    }
    return "?";
}

double sign_test_p(int wins, int n) {
    if (n <= 0) return 1.0;
    // sum C(n,k)/2^n for k = wins..n in log space
    double p = 0.0;
    for (int k = wins; k <= n; ++k) {
        double log_c = 0.0;
        for (int i = 1; i <= k; ++i)
            log_c += std::log(static_cast<double>(n - k + i)) - std::log(static_cast<double>(i));
        p += std::exp(log_c - static_cast<double>(n) * std::log(2.0));
    }
    return std::min(p, 1.0);
}

namespace {

double metric_of(const ReportRow& r, Metric m) {
    switch (m) {
        case Metric::waiting: return r.enhanced_waiting;
        case Metric::violation: return r.enhanced_violation;
        case Metric::penalty_waiting: return r.enhanced_penalty_waiting;
        case Metric::penalty_sla: return r.enhanced_penalty_sla;
    }
    return 0.0;
}

}  // namespace

CompareResult compare_strategies(const Report& report, Metric metric,
                                 const std::vector<std::string>& expected_order) {
    // strategy -> replication -> system metric
    std::vector<std::string> order;  // first-seen order
    std::map<std::string, std::map<int, double>> values;
    for (const ReportRow& r : report.rows) {
        if (r.entity != "system" || !r.error.empty()) continue;
        if (!values.count(r.strategy)) order.push_back(r.strategy);
        values[r.strategy][r.replication] = metric_of(r, metric);
    }
    if (order.size() < 2) throw InvariantError("compare: need at least 2 strategies");
    for (const auto& name : order)
        if (static_cast<int>(values[name].size()) < 10)
            throw InvariantError("compare: strategy '" + name + "' has " +
                                 std::to_string(values[name].size()) +
                                 " replications, need at least 10");

    CompareResult result;
    result.metric = metric;
    result.expected_order = expected_order;
    for (const auto& name : order) {
        StrategyStats stats;
        stats.strategy = name;
        stats.replications = static_cast<int>(values[name].size());
        double sum = 0.0;
        for (const auto& [rep, v] : values[name]) sum += v;
        stats.mean = sum / static_cast<double>(stats.replications);
        result.ranked.push_back(std::move(stats));
    }
    std::stable_sort(result.ranked.begin(), result.ranked.end(),
                     [](const StrategyStats& a, const StrategyStats& b) { return a.mean < b.mean; });

    for (std::size_t i = 0; i + 1 < result.ranked.size(); ++i) {
        const auto& a = result.ranked[i];
        const auto& b = result.ranked[i + 1];
        PairwiseTest t;
        t.better = a.strategy;
        t.worse = b.strategy;
        for (const auto& [rep, va] : values[a.strategy]) {
            auto it = values[b.strategy].find(rep);
            if (it == values[b.strategy].end()) continue;
            ++t.n;
            if (va < it->second) ++t.wins;
            else if (va == it->second) ++t.ties;
        }
        t.p_value = sign_test_p(t.wins, t.n - t.ties);
        result.tests.push_back(std::move(t));
    }

    if (!expected_order.empty()) {
        std::vector<double> means;
        for (const auto& name : expected_order) {
            bool found = false;
            for (const auto& s : result.ranked)
                if (s.strategy == name) {
                    means.push_back(s.mean);
                    found = true;
                }
            if (!found) throw InvariantError("compare: expected strategy '" + name +
                                             "' not present in the report");
        }
        for (std::size_t i = 0; i + 1 < means.size(); ++i)
            if (means[i] > means[i + 1]) result.expected_order_holds = false;
    }
    return result;
}

std::string CompareResult::to_text() const {
    std::ostringstream out;
    out << "metric: " << to_string(metric) << '\n';
    out << "rank strategy mean replications\n";
    for (std::size_t i = 0; i < ranked.size(); ++i)
        out << (i + 1) << ' ' << ranked[i].strategy << ' ' << fmt(ranked[i].mean) << ' '
            << ranked[i].replications << '\n';
    for (const PairwiseTest& t : tests)
        out << t.better << " < " << t.worse << ": wins " << t.wins << "/" << t.n
            << " (ties " << t.ties << "), sign-test p=" << fmt(t.p_value) << '\n';
    if (!expected_order.empty())
        out << "expected order " << (expected_order_holds ? "holds" : "VIOLATED") << '\n';
    return out.str();
}

}  // namespace tiersched
