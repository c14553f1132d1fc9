#include "tiersched/bench.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "tiersched/ga.hpp"
#include "tiersched/oracle.hpp"
#include "tiersched/rng.hpp"

namespace tiersched {

GaScheduler::GaScheduler(StrategySpec spec, GAConfig ga, PenaltyParams penalty, int n_tiers,
                         bool rescheduling_enabled)
    : spec_(std::move(spec)), ga_(ga), penalty_(penalty), enabled_(rescheduling_enabled) {
    if (spec_.kind != StrategySpec::Kind::ga)
        throw InvariantError("GaScheduler wants a ga:* strategy spec");
    if (spec_.differentiated) penalty_.differentiated = *spec_.differentiated;
    dispatch_.reserve(static_cast<std::size_t>(n_tiers));
    for (int j = 0; j < n_tiers; ++j) dispatch_.emplace_back(BaselineKind{BaselinePolicy::fcfs, {}});
}

std::string GaScheduler::name() const {
    return spec_.text;
}

int GaScheduler::route(const Job&, int tier, const std::vector<QueueLoad>& loads) {
    return dispatch_[static_cast<std::size_t>(tier)].pick(loads);
}

std::optional<Schedule> GaScheduler::reschedule(const Snapshot& snap) {
    if (!enabled_ || snap.pending_count() == 0) return std::nullopt;

    auto evolve_into = [&](const ScopeSpec& scope, Schedule& schedule, const std::string& label) {
        GAConfig cfg = ga_;
        cfg.seed = mix_seed(ga_.seed, evolve_seq_++);
        const EvolveResult result = evolve(snap, scope, spec_.fitness, cfg, penalty_);
        const Schedule decoded = decode(result.best, snap);
        switch (scope.kind) {
            case GaScope::system:
                schedule = decoded;
                break;
            case GaScope::tier:
                schedule.tiers[static_cast<std::size_t>(scope.tier)] =
                    decoded.tiers[static_cast<std::size_t>(scope.tier)];
                break;
            case GaScope::single_queue:
                schedule.tiers[static_cast<std::size_t>(scope.tier)]
                    .queues[static_cast<std::size_t>(scope.queue)] =
                    decoded.tiers[static_cast<std::size_t>(scope.tier)]
                        .queues[static_cast<std::size_t>(scope.queue)];
                break;
        }
        traces_.push_back({snap.now, label, result.best_trace, result.mean_trace});
    };

    Schedule schedule = snapshot_schedule(snap);
    char label[64];
    switch (spec_.layout) {
        case StrategySpec::Layout::system:
            evolve_into({GaScope::system, 0, 0}, schedule, "system");
            break;
        case StrategySpec::Layout::tier:
            for (int j = 0; j < snap.n_tiers; ++j) {
                if (snap.pending_in_tier(j) == 0) continue;
                std::snprintf(label, sizeof(label), "tier %d", j + 1);
                evolve_into({GaScope::tier, j, 0}, schedule, label);
            }
            break;
        case StrategySpec::Layout::segmented:
            for (const SnapshotQueue& q : snap.queues) {
                if (q.pending.empty()) continue;
                std::snprintf(label, sizeof(label), "tier %d queue %d", q.tier + 1, q.queue + 1);
                evolve_into({GaScope::single_queue, q.tier, q.queue}, schedule, label);
            }
            break;
    }
    return schedule;
}

std::vector<ConvergenceTrace> GaScheduler::take_convergence() {
    return std::move(traces_);
}

std::unique_ptr<SchedulerBase> make_scheduler(const StrategySpec& spec, const Scenario& scenario,
                                              std::uint64_t ga_seed, bool rescheduling_enabled) {
    if (spec.kind == StrategySpec::Kind::baseline)
        return std::make_unique<BaselineScheduler>(BaselineKind{spec.baseline, {}},
                                                   scenario.topology.n_tiers);
    GAConfig ga = scenario.ga;
    ga.seed = ga_seed;
    return std::make_unique<GaScheduler>(spec, ga, scenario.penalty, scenario.topology.n_tiers,
                                         rescheduling_enabled);
}

WorkloadConfig replication_workload(const Scenario& scenario, int replication) {
    WorkloadConfig config = scenario.workload;
    config.seed = mix_seed(scenario.workload.seed, static_cast<std::uint64_t>(replication));
    if (scenario.n_jobs_range) {
        const auto [lo, hi] = *scenario.n_jobs_range;
        config.n_jobs =
            lo + static_cast<int>(mix_seed(config.seed, 0x6a0b5ULL) %
                                  static_cast<std::uint64_t>(hi - lo + 1));
    }
    return config;
}

std::uint64_t replication_ga_seed(const Scenario& scenario, std::size_t strategy_index,
                                  int replication) {
    return mix_seed(mix_seed(scenario.ga.seed, strategy_index),
                    static_cast<std::uint64_t>(replication));
}

namespace {

// Estimated totals of a schedule held against a frozen snapshot, grouped
// for the report rows. Waiting covers elapsed + remaining + passed tiers,
// violation the clamped overrun of the end-to-end budget.
struct SnapGroup {
    std::string entity;
    int jobs = 0;
    double waiting = 0.0;
    double violation = 0.0;
    double penalty_waiting = 0.0;
    double penalty_sla = 0.0;
};

std::vector<SnapGroup> snapshot_groups(const Snapshot& snap, const Schedule& schedule,
                                       const PenaltyParams& scenario_params) {
    PenaltyParams metric = scenario_params;
    metric.differentiated = true;
    metric.clamp_satisfied = true;

    std::vector<SnapGroup> groups;
    groups.push_back({"system", 0, 0, 0, 0, 0});
    char buf[64];
    for (int j = 0; j < snap.n_tiers; ++j) {
        std::snprintf(buf, sizeof(buf), "tier %d", j + 1);
        groups.push_back({buf, 0, 0, 0, 0, 0});
    }
    for (int j = 0; j < snap.n_tiers; ++j)
        for (int q = 0; q < snap.n_queues_per_tier; ++q) {
            std::snprintf(buf, sizeof(buf), "tier %d queue %d", j + 1, q + 1);
            groups.push_back({buf, 0, 0, 0, 0, 0});
        }
    auto tier_group = [&](int j) -> SnapGroup& { return groups[1 + static_cast<std::size_t>(j)]; };
    auto queue_group = [&](int j, int q) -> SnapGroup& {
        return groups[1 + static_cast<std::size_t>(snap.n_tiers) +
                      static_cast<std::size_t>(j) * static_cast<std::size_t>(snap.n_queues_per_tier) +
                      static_cast<std::size_t>(q)];
    };

    for (int j = 0; j < snap.n_tiers; ++j) {
        const auto& ordering = schedule.tiers[static_cast<std::size_t>(j)];
        for (int q = 0; q < snap.n_queues_per_tier; ++q) {
            TimeUnits ahead = metric.residual == ResidualPolicy::count_in_service
                                  ? snap.queue(j, q).residual
                                  : 0;
            for (JobId id : ordering.queues[static_cast<std::size_t>(q)]) {
                const SnapshotJob& job = snap.at(id);
                const double est_wait =
                    expected_multitier_wait(job.waited_prior, job.elapsed, ahead);
                const double alpha =
                    std::max(est_wait - static_cast<double>(job.allowance), 0.0);
                const double waiting = job.service_cost * est_wait;
                const double violation = job.violation_cost * alpha;
                const double pw =
                    metric.chi * (1.0 - std::exp(-metric.nu * job.service_cost * est_wait));
                const double ps =
                    metric.chi * (1.0 - std::exp(-metric.nu * job.violation_cost * alpha));
                for (SnapGroup* g : {&groups[0], &tier_group(j), &queue_group(j, q)}) {
                    g->jobs += 1;
                    g->waiting += waiting;
                    g->violation += violation;
                    g->penalty_waiting += pw;
                    g->penalty_sla += ps;
                }
                ahead += job.exec_here;
            }
        }
    }
    return groups;
}

void fill_initial(ReportRow& row, const SnapGroup& g) {
    row.jobs = g.jobs;
    row.initial_waiting = g.waiting;
    row.initial_violation = g.violation;
    row.initial_penalty_waiting = g.penalty_waiting;
    row.initial_penalty_sla = g.penalty_sla;
}

void fill_enhanced(ReportRow& row, const SnapGroup& g) {
    row.enhanced_waiting = g.waiting;
    row.enhanced_violation = g.violation;
    row.enhanced_penalty_waiting = g.penalty_waiting;
    row.enhanced_penalty_sla = g.penalty_sla;
}

void fill_initial(ReportRow& row, const Totals& t) {
    row.jobs = t.jobs;
    row.initial_waiting = t.weighted_waiting;
    row.initial_violation = t.weighted_violation;
    row.initial_penalty_waiting = t.penalty_waiting;
    row.initial_penalty_sla = t.penalty_sla;
}

void fill_enhanced(ReportRow& row, const Totals& t) {
    row.enhanced_waiting = t.weighted_waiting;
    row.enhanced_violation = t.weighted_violation;
    row.enhanced_penalty_waiting = t.penalty_waiting;
    row.enhanced_penalty_sla = t.penalty_sla;
}

void finish_improvements(ReportRow& row) {
    row.improvement_waiting_pct = improvement_pct(row.initial_waiting, row.enhanced_waiting);
    row.improvement_violation_pct = improvement_pct(row.initial_violation, row.enhanced_violation);
    row.improvement_penalty_waiting_pct =
        improvement_pct(row.initial_penalty_waiting, row.enhanced_penalty_waiting);
    row.improvement_penalty_sla_pct =
        improvement_pct(row.initial_penalty_sla, row.enhanced_penalty_sla);
}

std::vector<ReportRow> run_snapshot_cell(const Scenario& scenario, const StrategySpec& spec,
                                         std::size_t strategy_index, int replication,
                                         const WorkloadConfig& workload,
                                         std::vector<ReportConvergence>& convergence) {
    const JobStream stream = generate_stream(workload);
    BaselineScheduler fcfs({BaselinePolicy::fcfs, {}}, scenario.topology.n_tiers);
    const Snapshot snap =
        build_snapshot(stream, scenario.topology, fcfs, scenario.backlog_target);

    const Schedule initial = snapshot_schedule(snap);
    Schedule enhanced = initial;
    if (spec.kind == StrategySpec::Kind::ga) {
        GAConfig seeded = scenario.ga;
        seeded.seed = replication_ga_seed(scenario, strategy_index, replication);
        GaScheduler ga(spec, seeded, scenario.penalty, scenario.topology.n_tiers);
        if (auto schedule = ga.reschedule(snap)) enhanced = std::move(*schedule);
        for (ConvergenceTrace& t : ga.take_convergence())
            convergence.push_back(
                {spec.text, replication, t.label, t.epoch_time, std::move(t.best), std::move(t.mean)});
    }

    const auto before = snapshot_groups(snap, initial, scenario.penalty);
    const auto after = snapshot_groups(snap, enhanced, scenario.penalty);
    std::vector<ReportRow> rows;
    rows.reserve(before.size());
    for (std::size_t g = 0; g < before.size(); ++g) {
        ReportRow row;
        row.strategy = spec.text;
        row.replication = replication;
        row.seed = workload.seed;
        row.entity = before[g].entity;
        fill_initial(row, before[g]);
        fill_enhanced(row, after[g]);
        // queue membership can shift under migration; count the enhanced side
        row.jobs = after[g].jobs;
        finish_improvements(row);
        rows.push_back(std::move(row));
    }
    return rows;
}

std::vector<ReportRow> run_stream_cell(const Scenario& scenario, const StrategySpec& spec,
                                       std::size_t strategy_index, int replication,
                                       const WorkloadConfig& workload,
                                       std::vector<ReportConvergence>& convergence) {
    const JobStream stream = generate_stream(workload);
    SimOptions options;
    options.penalty = scenario.penalty;

    const std::uint64_t ga_seed = replication_ga_seed(scenario, strategy_index, replication);
    auto enhanced_sched = make_scheduler(spec, scenario, ga_seed, true);
    SimReport enhanced = run(stream, scenario.topology, *enhanced_sched, scenario.epochs, options);
    for (ConvergenceTrace& t : enhanced.convergence)
        convergence.push_back(
            {spec.text, replication, t.label, t.epoch_time, std::move(t.best), std::move(t.mean)});

    // the dispatch backbone without rescheduling is the "initial" column
    SimReport initial;
    if (spec.kind == StrategySpec::Kind::ga) {
        auto initial_sched = make_scheduler(spec, scenario, ga_seed, false);
        initial = run(stream, scenario.topology, *initial_sched, scenario.epochs, options);
    }
    const SimReport& base = spec.kind == StrategySpec::Kind::ga ? initial : enhanced;

    std::vector<ReportRow> rows;
    auto emit_row = [&](const Totals& init, const Totals& enh) {
        ReportRow row;
        row.strategy = spec.text;
        row.replication = replication;
        row.seed = workload.seed;
        row.entity = enh.entity;
        fill_initial(row, init);
        fill_enhanced(row, enh);
        finish_improvements(row);
        rows.push_back(std::move(row));
    };
    emit_row(base.totals, enhanced.totals);
    for (std::size_t j = 0; j < enhanced.tier_totals.size(); ++j)
        emit_row(base.tier_totals[j], enhanced.tier_totals[j]);
    for (std::size_t q = 0; q < enhanced.queue_totals.size(); ++q)
        emit_row(base.queue_totals[q], enhanced.queue_totals[q]);
    return rows;
}

}  // namespace

Report run_scenario(const Scenario& scenario) {
    scenario.validate();
    Report report;
    report.scenario_name = scenario.name;
    report.base_seed = scenario.workload.seed;

    for (std::size_t s = 0; s < scenario.strategies.size(); ++s) {
        const StrategySpec& spec = scenario.strategies[s];
        for (int rep = 0; rep < scenario.replications; ++rep) {
            const WorkloadConfig workload = replication_workload(scenario, rep);
            try {
                std::vector<ReportRow> rows =
                    scenario.mode == Scenario::Mode::snapshot
                        ? run_snapshot_cell(scenario, spec, s, rep, workload, report.convergence)
                        : run_stream_cell(scenario, spec, s, rep, workload, report.convergence);
                for (ReportRow& row : rows) report.rows.push_back(std::move(row));
            } catch (const InvariantError& err) {
                ReportRow row;
                row.strategy = spec.text;
                row.replication = rep;
                row.seed = workload.seed;
                row.entity = "system";
                row.error = err.what();
                report.rows.push_back(std::move(row));
            }
        }
    }
    return report;
}

}  // namespace tiersched
