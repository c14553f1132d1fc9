#include "tiersched/snapshot.hpp"

#include <algorithm>

namespace tiersched {

const SnapshotJob* Snapshot::find(JobId id) const {
    auto it = std::lower_bound(jobs.begin(), jobs.end(), id,
                               [](const SnapshotJob& j, JobId v) { return j.id < v; });
    if (it == jobs.end() || it->id != id) return nullptr;
    return &*it;
}

const SnapshotJob& Snapshot::at(JobId id) const {
    const SnapshotJob* j = find(id);
    if (j == nullptr) throw UnknownJobError(id);
    return *j;
}

const SnapshotQueue& Snapshot::queue(int tier, int q) const {
    const auto idx = static_cast<std::size_t>(tier) * static_cast<std::size_t>(n_queues_per_tier) +
                     static_cast<std::size_t>(q);
    if (tier < 0 || q < 0 || idx >= queues.size())
        throw InvariantError("no queue " + std::to_string(q) + " in tier " + std::to_string(tier));
    return queues[idx];
}

std::size_t Snapshot::pending_count() const {
    std::size_t n = 0;
    for (const auto& q : queues) n += q.pending.size();
    return n;
}

std::size_t Snapshot::pending_in_tier(int tier) const {
    std::size_t n = 0;
    for (const auto& q : queues)
        if (q.tier == tier) n += q.pending.size();
    return n;
}

TimeUnits snapshot_remaining_wait(const Snapshot& snap, JobId id, ResidualPolicy policy) {
    for (const auto& q : snap.queues) {
        TimeUnits ahead = policy == ResidualPolicy::count_in_service ? q.residual : 0;
        for (JobId pending : q.pending) {
            if (pending == id) return ahead;
            ahead += snap.at(pending).exec_here;
        }
    }
    throw UnknownJobError(id);
}

double expected_multitier_wait(const Snapshot& snap, JobId id, ResidualPolicy policy) {
    const SnapshotJob& job = snap.at(id);
    const TimeUnits remaining = snapshot_remaining_wait(snap, id, policy);
    return expected_multitier_wait(job.waited_prior, job.elapsed, remaining);
}

double expected_tier_wait(const Snapshot& snap, JobId id, ResidualPolicy policy) {
    const SnapshotJob& job = snap.at(id);
    const TimeUnits remaining = snapshot_remaining_wait(snap, id, policy);
    return expected_tier_wait(job.elapsed, remaining);
}

void validate_candidate_schedule(const Snapshot& snap, const Schedule& schedule) {
    if (static_cast<int>(schedule.tiers.size()) != snap.n_tiers)
        throw InvariantError("schedule covers " + std::to_string(schedule.tiers.size()) +
                             " tiers, snapshot has " + std::to_string(snap.n_tiers));
    std::vector<JobId> seen;
    for (int tier = 0; tier < snap.n_tiers; ++tier) {
        const auto& ordering = schedule.tiers[static_cast<std::size_t>(tier)];
        if (static_cast<int>(ordering.queues.size()) != snap.n_queues_per_tier)
            throw InvariantError("tier " + std::to_string(tier) + ": schedule has " +
                                 std::to_string(ordering.queues.size()) + " queues, expected " +
                                 std::to_string(snap.n_queues_per_tier));
        std::size_t covered = 0;
        for (const auto& queue : ordering.queues) {
            for (JobId id : queue) {
                const SnapshotJob& job = snap.at(id);
                if (job.tier != tier)
                    throw InvariantError("job " + std::to_string(id) + " pends in tier " +
                                         std::to_string(job.tier) + ", scheduled in tier " +
                                         std::to_string(tier));
                seen.push_back(id);
                ++covered;
            }
        }
        if (covered != snap.pending_in_tier(tier))
            throw InvariantError("tier " + std::to_string(tier) + ": schedule places " +
                                 std::to_string(covered) + " jobs, " +
                                 std::to_string(snap.pending_in_tier(tier)) + " are pending");
    }
    std::sort(seen.begin(), seen.end());
    for (std::size_t i = 1; i < seen.size(); ++i)
        if (seen[i] == seen[i - 1])
            throw InvariantError("job " + std::to_string(seen[i]) +
                                 " appears twice in the schedule");
}

Schedule snapshot_schedule(const Snapshot& snap) {
    Schedule s;
    s.tiers.resize(static_cast<std::size_t>(snap.n_tiers));
    for (auto& tier : s.tiers)
        tier.queues.resize(static_cast<std::size_t>(snap.n_queues_per_tier));
    for (const auto& q : snap.queues)
        s.tiers[static_cast<std::size_t>(q.tier)].queues[static_cast<std::size_t>(q.queue)] =
            q.pending;
    return s;
}

}  // namespace tiersched
