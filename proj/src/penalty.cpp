#include "tiersched/penalty.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

namespace tiersched {

void PenaltyParams::validate() const {
    if (chi <= 0.0) throw InvariantError("penalty: chi must be > 0");
    if (nu <= 0.0) throw InvariantError("penalty: nu must be > 0");
}

namespace {

double saturating(double chi, double exponent) {
    return chi * -std::expm1(-exponent);
}

}  // namespace

double waiting_penalty(const Job& job, TimeUnits total_wait, const PenaltyParams& params) {
    return saturating(params.chi,
                      params.nu * params.waiting_weight(job) * static_cast<double>(total_wait));
}

double sla_penalty(const Job& job, TimeUnits alpha, const PenaltyParams& params) {
    const TimeUnits overrun = std::max<TimeUnits>(alpha, 0);
    return saturating(params.chi,
                      params.nu * params.violation_weight(job) * static_cast<double>(overrun));
}

ViolationReport violation_report(const std::vector<Job>& jobs, const TimingTrace& trace,
                                 const PenaltyParams& params) {
    ViolationReport report;
    report.entries.reserve(jobs.size());
    for (const Job& job : jobs) {
        const auto rt = response_time(trace, job);
        if (!rt) continue;  // still in flight
        ViolationEntry e;
        e.id = job.id;
        e.alpha = *rt - job.deadline();
        e.satisfied = e.alpha <= 0;
        e.eta = sla_penalty(job, e.alpha, params);
        report.total_violation += std::max<TimeUnits>(e.alpha, 0);
        report.total_penalty += e.eta;
        report.entries.push_back(e);
    }
    return report;
}

const char* to_string(FitnessKind kind) {
    switch (kind) {
        case FitnessKind::waiting: return "waiting";
        case FitnessKind::sla_allowance: return "sla_allowance";
        case FitnessKind::sla_tier_allowance: return "sla_tier_allowance";
    }
    return "?";
}

FitnessKind fitness_kind_from_name(const std::string& name) {
    if (name == "waiting") return FitnessKind::waiting;
    if (name == "sla_allowance") return FitnessKind::sla_allowance;
    if (name == "sla_tier_allowance") return FitnessKind::sla_tier_allowance;
    throw InvariantError("unknown fitness kind '" + name + "'");
}

double job_epoch_cost(const SnapshotJob& job, TimeUnits remaining, FitnessKind kind,
                      const PenaltyParams& params) {
    switch (kind) {
        case FitnessKind::waiting: {
            const double w = params.differentiated ? job.service_cost : 1.0;
            return w * static_cast<double>(job.elapsed + remaining);
        }
        case FitnessKind::sla_allowance: {
            const double w = params.differentiated ? job.violation_cost : 1.0;
            double alpha = expected_multitier_wait(job.waited_prior, job.elapsed, remaining) -
                           static_cast<double>(job.allowance);
            if (params.clamp_satisfied) alpha = std::max(alpha, 0.0);
            return w * alpha;
        }
        case FitnessKind::sla_tier_allowance: {
            const double w = params.differentiated ? job.violation_cost : 1.0;
            double alpha = job.prior_tier_alpha + expected_tier_wait(job.elapsed, remaining) -
                           job.tier_allow_here;
            if (params.clamp_satisfied) alpha = std::max(alpha, 0.0);
            return w * alpha;
        }
    }
    return 0.0;
}

namespace {

// Remaining queue wait per pending job under `schedule`, computed positionally.
std::unordered_map<JobId, TimeUnits> positional_waits(const Snapshot& snap,
                                                      const Schedule& schedule,
                                                      ResidualPolicy policy) {
    validate_candidate_schedule(snap, schedule);
    std::unordered_map<JobId, TimeUnits> waits;
    waits.reserve(snap.jobs.size());
    for (int tier = 0; tier < snap.n_tiers; ++tier) {
        const auto& ordering = schedule.tiers[static_cast<std::size_t>(tier)];
        for (int q = 0; q < snap.n_queues_per_tier; ++q) {
            TimeUnits ahead =
                policy == ResidualPolicy::count_in_service ? snap.queue(tier, q).residual : 0;
            for (JobId id : ordering.queues[static_cast<std::size_t>(q)]) {
                const SnapshotJob& job = snap.at(id);
                waits.emplace(id, ahead);
                ahead += job.exec_here;
            }
        }
    }
    return waits;
}

}  // namespace

double evaluate_schedule(const Snapshot& snap, const Schedule& schedule, FitnessKind kind,
                         const PenaltyParams& params) {
    const auto waits = positional_waits(snap, schedule, params.residual);
    double total = 0.0;
    for (const SnapshotJob& job : snap.jobs) total += job_epoch_cost(job, waits.at(job.id), kind, params);
    return total;
}

double objective_waiting(const Snapshot& snap, const Schedule& schedule,
                         const PenaltyParams& params) {
    return evaluate_schedule(snap, schedule, FitnessKind::waiting, params);
}

double objective_multitier_allowance(const Snapshot& snap, const Schedule& schedule,
                                     const PenaltyParams& params) {
    return evaluate_schedule(snap, schedule, FitnessKind::sla_allowance, params);
}

double objective_tier_allowance(const Snapshot& snap, const Schedule& schedule,
                                const PenaltyParams& params) {
    return evaluate_schedule(snap, schedule, FitnessKind::sla_tier_allowance, params);
}

}  // namespace tiersched
