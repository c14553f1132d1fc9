#pragma once

// Hand-built snapshots for the evaluation and search tests.

#include <optional>
#include <vector>

#include "tiersched/snapshot.hpp"

namespace tiersched::testing {

class SnapshotBuilder {
  public:
    SnapshotBuilder(int n_tiers, int n_queues) {
        snap_.n_tiers = n_tiers;
        snap_.n_queues_per_tier = n_queues;
        for (int j = 0; j < n_tiers; ++j)
            for (int q = 0; q < n_queues; ++q) snap_.queues.push_back({j, q, std::nullopt, 0, {}});
    }

    SnapshotBuilder& now(TimeUnits t) {
        snap_.now = t;
        return *this;
    }

    SnapshotBuilder& residual(int tier, int queue, JobId in_service, TimeUnits remaining) {
        auto& q = queue_at(tier, queue);
        q.in_service = in_service;
        q.residual = remaining;
        return *this;
    }

    /// Appends a pending job at the tail of (tier, queue).
    SnapshotBuilder& job(JobId id, int tier, int queue, TimeUnits exec, double psi = 1.0,
                         double zeta = 1.0, TimeUnits allowance = 1000000, TimeUnits elapsed = 0,
                         TimeUnits waited_prior = 0, double tier_allow = -1.0,
                         double prior_alpha = 0.0) {
        queue_at(tier, queue).pending.push_back(id);
        SnapshotJob j;
        j.id = id;
        j.tier = tier;
        j.exec_here = exec;
        j.service_cost = psi;
        j.violation_cost = zeta;
        j.elapsed = elapsed;
        j.waited_prior = waited_prior;
        j.allowance = allowance;
        j.tier_allow_here = tier_allow < 0.0 ? static_cast<double>(allowance) : tier_allow;
        j.prior_tier_alpha = prior_alpha;
        snap_.jobs.push_back(j);
        return *this;
    }

    Snapshot build() {
        Snapshot out = snap_;
        std::sort(out.jobs.begin(), out.jobs.end(),
                  [](const SnapshotJob& a, const SnapshotJob& b) { return a.id < b.id; });
        return out;
    }

  private:
    SnapshotQueue& queue_at(int tier, int queue) {
        return snap_.queues[static_cast<std::size_t>(tier) *
                                static_cast<std::size_t>(snap_.n_queues_per_tier) +
                            static_cast<std::size_t>(queue)];
    }

    Snapshot snap_;
};

}  // namespace tiersched::testing
