#pragma once

#include <vector>

#include "tiersched/snapshot.hpp"
#include "tiersched/types.hpp"

namespace tiersched {

/// Knobs of the penalty model. `chi` caps every per-job penalty, `nu` scales
/// the exponent. With `differentiated` off the per-job cost coefficients are
/// treated as 1, which turns the weighted objectives into plain time sums.
/// `clamp_satisfied` zeroes the contribution of jobs ahead of their budget;
/// switching it off reproduces the bare signed sums.
struct PenaltyParams {
    double chi = 1.0;
    double nu = 0.01 / 1000.0;
    bool differentiated = true;
    bool clamp_satisfied = true;
    ResidualPolicy residual = ResidualPolicy::count_in_service;

    double waiting_weight(const Job& job) const { return differentiated ? job.service_cost : 1.0; }
    double violation_weight(const Job& job) const {
        return differentiated ? job.violation_cost : 1.0;
    }

    void validate() const;
};

/// Saturating waiting penalty: chi * (1 - exp(-nu * psi * wait)).
double waiting_penalty(const Job& job, TimeUnits total_wait, const PenaltyParams& params);

/// Saturating deadline-overrun penalty: chi * (1 - exp(-nu * zeta * alpha))
/// for alpha > 0; early or on-time completion costs nothing.
double sla_penalty(const Job& job, TimeUnits alpha, const PenaltyParams& params);

/// Per-job violation outcome of a finished stream.
struct ViolationEntry {
    JobId id = 0;
    TimeUnits alpha = 0;  // response minus deadline; negative means early
    double eta = 0.0;
    bool satisfied = true;
};

struct ViolationReport {
    std::vector<ViolationEntry> entries;
    TimeUnits total_violation = 0;  // clamped
    double total_penalty = 0.0;
};

ViolationReport violation_report(const std::vector<Job>& jobs, const TimingTrace& trace,
                                 const PenaltyParams& params);

/// Objective kinds shared by schedule evaluation and the search in ga.
enum class FitnessKind {
    waiting,              // cost-weighted queue waits
    sla_allowance,        // weighted overrun of the end-to-end waiting budget
    sla_tier_allowance,   // weighted overrun of the per-tier budget slices
};

const char* to_string(FitnessKind kind);
FitnessKind fitness_kind_from_name(const std::string& name);

/// Cost contribution of one pending job under the given objective, once its
/// remaining queue wait is known.
double job_epoch_cost(const SnapshotJob& job, TimeUnits remaining, FitnessKind kind,
                      const PenaltyParams& params);

/// Evaluates a candidate schedule against a frozen snapshot. The schedule
/// must keep each tier's pending set intact (jobs may change queues within
/// their tier, never tiers); anything else is rejected.
double evaluate_schedule(const Snapshot& snap, const Schedule& schedule, FitnessKind kind,
                         const PenaltyParams& params);

double objective_waiting(const Snapshot& snap, const Schedule& schedule,
                         const PenaltyParams& params);
double objective_multitier_allowance(const Snapshot& snap, const Schedule& schedule,
                                     const PenaltyParams& params);
double objective_tier_allowance(const Snapshot& snap, const Schedule& schedule,
                                const PenaltyParams& params);

}  // namespace tiersched
