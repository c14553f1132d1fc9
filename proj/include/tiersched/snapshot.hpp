#pragma once

#include <optional>
#include <vector>

#include "tiersched/timing.hpp"
#include "tiersched/types.hpp"

namespace tiersched {

/// Evaluation view of one pending job, frozen at a decision epoch.
struct SnapshotJob {
    JobId id = 0;
    int tier = 0;                   // tier the job currently holds in
    TimeUnits exec_here = 0;        // demand in that tier
    double service_cost = 1.0;
    double violation_cost = 1.0;
    TimeUnits elapsed = 0;          // wait accrued in the holding tier so far
    TimeUnits waited_prior = 0;     // realized waits in tiers already passed
    TimeUnits allowance = 0;        // end-to-end waiting budget
    double tier_allow_here = 0.0;   // the holding tier's slice of the budget
    double prior_tier_alpha = 0.0;  // overruns already banked in passed tiers

    bool operator==(const SnapshotJob&) const = default;
};

struct SnapshotQueue {
    int tier = 0;
    int queue = 0;
    std::optional<JobId> in_service;
    TimeUnits residual = 0;       // service remaining for in_service, 0 when idle
    std::vector<JobId> pending;   // current execution order

    bool operator==(const SnapshotQueue&) const = default;
};

/// Immutable freeze of the queue state at a decision epoch. Everything a
/// schedule evaluation needs lives here, so evaluations stay pure and can
/// run concurrently over one snapshot.
struct Snapshot {
    TimeUnits now = 0;
    int n_tiers = 0;
    int n_queues_per_tier = 0;
    std::vector<SnapshotQueue> queues;  // (tier, queue) ascending
    std::vector<SnapshotJob> jobs;      // ascending by id

    const SnapshotJob* find(JobId id) const;
    const SnapshotJob& at(JobId id) const;  // throws UnknownJobError
    const SnapshotQueue& queue(int tier, int q) const;
    std::size_t pending_count() const;
    std::size_t pending_in_tier(int tier) const;

    bool operator==(const Snapshot&) const = default;
};

/// Queue wait still ahead of `id` under the pending orders recorded in the
/// snapshot. Throws UnknownJobError when the job is not pending anywhere.
TimeUnits snapshot_remaining_wait(const Snapshot& snap, JobId id,
                                  ResidualPolicy policy = ResidualPolicy::count_in_service);

/// Expected end-to-end wait of a pending job (passed tiers realized, holding
/// tier elapsed + remaining). Rejects jobs not resident in the snapshot.
double expected_multitier_wait(const Snapshot& snap, JobId id,
                               ResidualPolicy policy = ResidualPolicy::count_in_service);

/// Expected wait within the holding tier only.
double expected_tier_wait(const Snapshot& snap, JobId id,
                          ResidualPolicy policy = ResidualPolicy::count_in_service);

/// The snapshot's own pending orders as a Schedule (identity schedule).
Schedule snapshot_schedule(const Snapshot& snap);

/// Checks that a candidate keeps every tier's pending set intact: full queue
/// coverage, no duplicates or unknown ids, no job moved across tiers.
/// Violations raise InvariantError naming the offending job or queue.
void validate_candidate_schedule(const Snapshot& snap, const Schedule& schedule);

}  // namespace tiersched
