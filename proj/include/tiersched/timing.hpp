#pragma once

#include <span>
#include <unordered_map>
#include <vector>

#include "tiersched/types.hpp"

namespace tiersched {

/// Whether the unfinished remainder of an in-service job counts toward the
/// queue waits of the jobs behind it. Counting it keeps the estimates
/// monotone in time; `ignore_in_service` reproduces the bare
/// predecessors-only sum.
enum class ResidualPolicy {
    count_in_service,
    ignore_in_service,
};

/// Remaining queue wait of every job in `order`: the residual of the job
/// currently in service (policy permitting) plus the demands of all queue
/// predecessors. Throws UnknownJobError for ids without an execution time.
std::vector<TimeUnits> queue_waiting_times(
    std::span<const JobId> order,
    const std::unordered_map<JobId, TimeUnits>& exec_times,
    TimeUnits in_service_residual = 0,
    ResidualPolicy policy = ResidualPolicy::count_in_service);

/// Expected end-to-end wait of a job holding in some tier: waits realized in
/// the tiers already passed, plus the wait elapsed where it sits, plus the
/// queue wait still ahead of it there. Tiers the job has not reached are
/// deliberately not forecast.
double expected_multitier_wait(TimeUnits waited_prior, TimeUnits elapsed, TimeUnits remaining);

/// Expected wait inside the holding tier only.
double expected_tier_wait(TimeUnits elapsed, TimeUnits remaining);

}  // namespace tiersched
