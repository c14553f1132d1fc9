// Command-line front end: generate workloads, run scenarios, compare
// reports, and spot-check the search against exhaustive enumeration.
// Exit codes: 0 ok, 1 usage or I/O trouble, 2 invariant/acceptance failure.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "tiersched/bench.hpp"
#include "tiersched/oracle.hpp"

namespace fs = std::filesystem;
using namespace tiersched;

namespace {

int cmd_generate(const std::string& scenario_path, std::uint64_t seed, bool seed_set,
                 const std::string& out) {
    Scenario scenario = Scenario::load(scenario_path);
    WorkloadConfig config = scenario.workload;
    if (seed_set) config.seed = seed;
    const JobStream stream = generate_stream(config);
    save_stream(stream, out);
    std::cout << "wrote " << stream.jobs.size() << " jobs to " << out << "\n";
    return 0;
}

int cmd_run(const std::string& scenario_path, std::uint64_t seed, bool seed_set, int replications,
            std::string out_dir, std::string format) {
    Scenario scenario = Scenario::load(scenario_path);
    if (seed_set) scenario.workload.seed = seed;
    if (replications > 0) scenario.replications = replications;
    if (out_dir.empty()) out_dir = scenario.output_dir.empty() ? "." : scenario.output_dir;
    if (format.empty()) format = scenario.output_format;
    const ReportFormat rf = report_format_from_name(format);

    const Report report = run_scenario(scenario);
    fs::create_directories(out_dir);
    const fs::path path =
        fs::path(out_dir) / (scenario.name + (rf == ReportFormat::csv ? ".csv" : ".jsonl"));
    write_report(report, path, rf);
    std::cout << "wrote " << report.rows.size() << " rows to " << path.string() << "\n";
    if (!report.convergence.empty()) {
        const fs::path conv = fs::path(out_dir) / (scenario.name + "_convergence.tsv");
        std::ofstream out(conv, std::ios::binary);
        if (!out) throw InvariantError("cannot open '" + conv.string() + "' for writing");
        out << convergence_to_text(report);
        std::cout << "wrote convergence series to " << conv.string() << "\n";
    }

    int failed = 0;
    for (const ReportRow& row : report.rows)
        if (!row.error.empty()) {
            std::cerr << "cell failed: " << row.strategy << " rep " << row.replication << ": "
                      << row.error << "\n";
            ++failed;
        }
    return failed == 0 ? 0 : 2;
}

int cmd_compare(const std::vector<std::string>& report_paths, const std::string& metric_name,
                const std::string& expect) {
    Report merged;
    bool first = true;
    for (const std::string& path : report_paths) {
        Report r = read_report(path);
        if (first) {
            merged = std::move(r);
            first = false;
        } else {
            for (auto& row : r.rows) merged.rows.push_back(std::move(row));
        }
    }
    std::vector<std::string> expected_order;
    if (!expect.empty()) {
        std::istringstream in(expect);
        std::string tok;
        while (std::getline(in, tok, '>')) {
            if (!tok.empty()) expected_order.push_back(tok);
        }
    }
    const CompareResult result =
        compare_strategies(merged, metric_from_name(metric_name), expected_order);
    std::cout << result.to_text();
    return result.expected_order_holds ? 0 : 2;
}

// Small seeded instances: the evolutionary search must never beat the
// enumerated optimum and should normally reach it.
int cmd_oracle(int jobs, int queues, int cases, std::uint64_t seed) {
    int failures = 0;
    for (int k = 0; k < cases; ++k) {
        WorkloadConfig config;
        config.n_tiers = 1;
        config.n_resources = queues;
        config.n_jobs = jobs;
        config.seed = mix_seed(seed, static_cast<std::uint64_t>(k));
        config.arrival = ArrivalProcess::batch_at_zero;
        const JobStream stream = generate_stream(config);

        BaselineScheduler fcfs({BaselinePolicy::fcfs, {}}, 1);
        const Snapshot snap = build_snapshot(stream, {1, queues}, fcfs, 0);

        PenaltyParams params;
        const auto exact =
            brute_force_best(snap, {GaScope::tier, 0, 0}, FitnessKind::waiting, params);
        GAConfig ga;
        ga.generations = 200;
        ga.seed = config.seed;
        const auto evolved = evolve(snap, {GaScope::tier, 0, 0}, FitnessKind::waiting, ga, params);

        const bool sound = evolved.best_cost >= exact.cost - 1e-6;
        const bool optimal = evolved.best_cost <= exact.cost * (1.0 + 1e-9);
        std::cout << "case " << k << ": optimum " << exact.cost << " (x" << exact.optima
                  << "), search " << evolved.best_cost << (optimal ? " [optimal]" : "")
                  << (sound ? "" : " [UNSOUND]") << "\n";
        if (!sound) ++failures;
    }
    if (failures > 0) {
        std::cerr << failures << " case(s) violated the enumeration bound\n";
        return 2;
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"multi-tier SLA-penalty scheduling workbench"};
    app.require_subcommand(1);

    std::string scenario_path, out, format, metric = "waiting", expect;
    std::vector<std::string> reports;
    std::uint64_t seed = 0;
    int replications = 0, jobs = 7, queues = 2, cases = 20;

    auto* generate = app.add_subcommand("generate", "generate a workload stream file");
    generate->add_option("--scenario", scenario_path, "scenario file")->required();
    auto* gen_seed = generate->add_option("--seed", seed, "workload seed override");
    generate->add_option("--out", out, "stream file path")->required();

    auto* run_cmd = app.add_subcommand("run", "run a scenario and write its report");
    run_cmd->add_option("--scenario", scenario_path, "scenario file")->required();
    auto* run_seed = run_cmd->add_option("--seed", seed, "workload seed override");
    run_cmd->add_option("--replications", replications, "replication count override");
    run_cmd->add_option("--out", out, "output directory");
    run_cmd->add_option("--format", format, "csv|jsonl");

    auto* compare = app.add_subcommand("compare", "rank strategies across reports");
    compare->add_option("reports", reports, "report files")->required();
    compare->add_option("--metric", metric, "waiting|violation|penalty-waiting|penalty-sla");
    compare->add_option("--expect", expect, "expected order, best first, e.g. a>b>c");

    auto* oracle = app.add_subcommand("oracle", "exhaustive-enumeration spot check");
    oracle->add_option("--jobs", jobs, "jobs per instance (<= 9)");
    oracle->add_option("--queues", queues, "queues in the single tier");
    oracle->add_option("--cases", cases, "instances to check");
    oracle->add_option("--seed", seed, "base seed");

    CLI11_PARSE(app, argc, argv);

    try {
        if (generate->parsed())
            return cmd_generate(scenario_path, seed, !gen_seed->empty(), out);
        if (run_cmd->parsed())
            return cmd_run(scenario_path, seed, !run_seed->empty(), replications, out, format);
        if (compare->parsed()) return cmd_compare(reports, metric, expect);
        if (oracle->parsed()) return cmd_oracle(jobs, queues, cases, seed);
    } catch (const InvariantError& err) {
        std::cerr << "error: " << err.what() << "\n";
        return 2;
    } catch (const std::exception& err) {
        std::cerr << "error: " << err.what() << "\n";
        return 1;
    }
    return 1;
}
