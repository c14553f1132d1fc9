#pragma once

#include <memory>

#include "tiersched/report.hpp"
#include "tiersched/scenario.hpp"

namespace tiersched {

/// Evolutionary scheduler: baseline dispatch on arrival, one evolution per
/// covered virtual queue at every reschedule epoch. Epoch seeds derive from
/// the base seed and a running call counter, so runs replay exactly.
class GaScheduler : public SchedulerBase {
  public:
    GaScheduler(StrategySpec spec, GAConfig ga, PenaltyParams penalty, int n_tiers,
                bool rescheduling_enabled = true);

    std::string name() const override;
    int route(const Job& job, int tier, const std::vector<QueueLoad>& loads) override;
    std::optional<Schedule> reschedule(const Snapshot& snap) override;
    std::vector<ConvergenceTrace> take_convergence() override;

    const PenaltyParams& fitness_params() const { return penalty_; }

  private:
    StrategySpec spec_;
    GAConfig ga_;
    PenaltyParams penalty_;
    bool enabled_;
    std::vector<DispatchRule> dispatch_;
    std::vector<ConvergenceTrace> traces_;
    std::uint64_t evolve_seq_ = 0;
};

/// Scheduler for a strategy spec. `rescheduling_enabled=false` yields the
/// strategy's dispatch backbone (the "initial" run of stream scenarios).
std::unique_ptr<SchedulerBase> make_scheduler(const StrategySpec& spec, const Scenario& scenario,
                                              std::uint64_t ga_seed,
                                              bool rescheduling_enabled = true);

/// Runs every strategy over every seeded replication and assembles the
/// rows (system, per tier, per queue) plus convergence series. A failing
/// cell is recorded with its diagnostic; the other cells proceed.
Report run_scenario(const Scenario& scenario);

/// Replication-specific workload: derived seed, and a size drawn from the
/// scenario's n_jobs_range when one is configured.
WorkloadConfig replication_workload(const Scenario& scenario, int replication);

std::uint64_t replication_ga_seed(const Scenario& scenario, std::size_t strategy_index,
                                  int replication);

}  // namespace tiersched
