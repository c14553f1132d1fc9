#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "tiersched/baselines.hpp"
#include "tiersched/penalty.hpp"
#include "tiersched/snapshot.hpp"
#include "tiersched/types.hpp"
#include "tiersched/workload.hpp"

namespace tiersched {

struct Topology {
    int n_tiers = 1;
    int n_resources = 1;
};

/// Reschedule triggers: at every distinct stream-arrival timestamp, on a
/// fixed period, or both. Period 0 disables periodic epochs.
struct EpochPolicy {
    bool on_batch_arrival = true;
    TimeUnits period = 0;
};

/// Simulation events. The numeric order of the kinds is the tie-break rank
/// for simultaneous events; job id breaks the remaining ties.
enum class EventKind : int {
    departure = 0,
    arrival = 1,
    service_start = 2,
    reschedule_epoch = 3,
};

struct Event {
    TimeUnits time = 0;
    EventKind kind = EventKind::arrival;
    JobId job = 0;
    int tier = 0;
    int resource = 0;
};

/// Heap comparator: earliest time first, then kind rank, then job id.
struct EventAfter {
    bool operator()(const Event& a, const Event& b) const {
        if (a.time != b.time) return a.time > b.time;
        if (a.kind != b.kind) return static_cast<int>(a.kind) > static_cast<int>(b.kind);
        return a.job > b.job;
    }
};

/// Best/mean fitness series of one evolutionary run, generation by generation.
struct ConvergenceTrace {
    TimeUnits epoch_time = 0;
    std::string label;
    std::vector<double> best;
    std::vector<double> mean;
};

/// Scheduling hooks the event loop calls into. Routing happens once per
/// tier entry; rescheduling is offered the frozen pending state at every
/// epoch and may return replacement queue orders (jobs already in service
/// are not part of the snapshot and cannot be touched).
class SchedulerBase {
  public:
    virtual ~SchedulerBase() = default;
    virtual std::string name() const = 0;
    virtual int route(const Job& job, int tier, const std::vector<QueueLoad>& loads) = 0;
    virtual std::optional<Schedule> reschedule(const Snapshot&) { return std::nullopt; }
    /// Hands over any fitness series collected during the run.
    virtual std::vector<ConvergenceTrace> take_convergence() { return {}; }
};

/// Baseline scheduler: dispatch only, never reorders.
class BaselineScheduler : public SchedulerBase {
  public:
    BaselineScheduler(BaselineKind kind, int n_tiers);
    std::string name() const override;
    int route(const Job& job, int tier, const std::vector<QueueLoad>& loads) override;

  private:
    BaselineKind kind_;
    std::vector<DispatchRule> per_tier_;
};

/// Replayable record of every scheduling decision the run took.
struct Decision {
    enum class Kind { route, reorder } kind = Kind::route;
    TimeUnits time = 0;
    JobId job = 0;   // route only
    int tier = 0;    // route only
    int queue = 0;   // route only
    Schedule schedule;  // reorder only

    bool operator==(const Decision&) const = default;
};

using DecisionLog = std::vector<Decision>;

/// Aggregated realized metrics for one reporting entity.
struct Totals {
    std::string entity;       // "system", "tier 1", "tier 1 queue 2"
    int jobs = 0;
    TimeUnits waiting = 0;            // plain waiting time
    double weighted_waiting = 0.0;    // cost-weighted waiting time
    TimeUnits violation = 0;          // overrun time, clamped at zero per job
    double weighted_violation = 0.0;  // cost-weighted overrun
    double penalty_waiting = 0.0;     // saturating waiting-penalty total
    double penalty_sla = 0.0;         // saturating violation-penalty total
};

struct SimReport {
    TimingTrace trace;
    Totals totals;
    std::vector<Totals> tier_totals;
    std::vector<Totals> queue_totals;  // (tier, queue) ascending
    DecisionLog decisions;
    std::vector<ConvergenceTrace> convergence;
};

struct SimOptions {
    PenaltyParams penalty;
    bool record_decisions = true;
};

/// Runs the stream to completion. Deterministic for fixed inputs: the event
/// loop is single-threaded and ties are broken by the Event rank order.
/// A scheduler returning a schedule that drops, duplicates or tier-migrates
/// a pending job aborts the run with an InvariantError diagnostic.
SimReport run(const JobStream& stream, const Topology& topo, SchedulerBase& scheduler,
              const EpochPolicy& epochs, const SimOptions& options = {});

/// Dispatches under `scheduler` until the pending backlog first reaches
/// `backlog_target` (or, for batch streams with target 0, until the opening
/// batch is routed) and returns the frozen state at that moment.
Snapshot build_snapshot(const JobStream& stream, const Topology& topo, SchedulerBase& scheduler,
                        int backlog_target = 0);

/// Columnar per-job text dump of a finished run (see docs/formats.md).
std::string trace_to_text(const SimReport& report, const JobStream& stream,
                          const PenaltyParams& params);

}  // namespace tiersched
