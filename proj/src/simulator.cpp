#include "tiersched/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <deque>
#include <queue>
#include <set>
#include <sstream>

namespace tiersched {

BaselineScheduler::BaselineScheduler(BaselineKind kind, int n_tiers) : kind_(std::move(kind)) {
    per_tier_.reserve(static_cast<std::size_t>(n_tiers));
    for (int j = 0; j < n_tiers; ++j) per_tier_.emplace_back(kind_);
}

std::string BaselineScheduler::name() const {
    return to_string(kind_.policy);
}

int BaselineScheduler::route(const Job&, int tier, const std::vector<QueueLoad>& loads) {
    return per_tier_[static_cast<std::size_t>(tier)].pick(loads);
}

namespace {

struct Resource {
    std::deque<JobId> queue;
    std::optional<JobId> in_service;
    TimeUnits busy_until = 0;
};

class Engine {
  public:
    Engine(const JobStream& stream, const Topology& topo, SchedulerBase& sched,
           const EpochPolicy& epochs, const SimOptions& opts)
        : stream_(stream), topo_(topo), sched_(sched), epochs_(epochs), opts_(opts) {
        if (topo_.n_tiers < 1 || topo_.n_resources < 1)
            throw InvariantError("topology: tiers and resources must be >= 1");
        if (static_cast<int>(stream_.config.n_tiers) != topo_.n_tiers)
            throw InvariantError("stream was generated for " +
                                 std::to_string(stream_.config.n_tiers) + " tiers, topology has " +
                                 std::to_string(topo_.n_tiers));
        for (const Job& job : stream_.jobs) validate_job(job, topo_.n_tiers);

        resources_.assign(static_cast<std::size_t>(topo_.n_tiers), {});
        for (auto& tier : resources_) tier.resize(static_cast<std::size_t>(topo_.n_resources));

        const auto n = stream_.jobs.size();
        arrivals_.assign(n, std::vector<TimeUnits>(static_cast<std::size_t>(topo_.n_tiers),
                                                   kUnknownTime));
        trace_.jobs.resize(n);
        for (std::size_t i = 0; i < n; ++i) {
            JobTiming& t = trace_.jobs[i];
            t.id = static_cast<JobId>(i + 1);
            t.waited.assign(static_cast<std::size_t>(topo_.n_tiers), 0);
            t.departures.assign(static_cast<std::size_t>(topo_.n_tiers), kUnknownTime);
            t.served_by.assign(static_cast<std::size_t>(topo_.n_tiers), -1);
        }
        unfinished_ = static_cast<int>(n);

        for (const Job& job : stream_.jobs)
            heap_.push({job.arrivals.front(), EventKind::arrival, job.id, 0, 0});
        if (epochs_.on_batch_arrival) {
            std::set<TimeUnits> batch_times;
            for (const Job& job : stream_.jobs) batch_times.insert(job.arrivals.front());
            for (TimeUnits t : batch_times) push_epoch(t);
        }
        if (epochs_.period > 0) push_epoch(epochs_.period);
    }

    SimReport run_to_completion() {
        drain(/*backlog_target=*/-1);
        return finish();
    }

    Snapshot run_to_backlog(int target) {
        if (auto snap = drain(target)) return *snap;
        throw InvariantError("stream drained before reaching a backlog of " +
                             std::to_string(target) + " jobs");
    }

  private:
    void push_epoch(TimeUnits t) {
        if (epoch_times_.insert(t).second)
            heap_.push({t, EventKind::reschedule_epoch, 0, 0, 0});
    }

    // Runs the event loop. With target >= 0 the loop stops and freezes the
    // state once the pending backlog reaches the target: at the first epoch
    // for target 0, otherwise at the first event-time boundary.
    std::optional<Snapshot> drain(int target) {
        while (!heap_.empty()) {
            const Event ev = heap_.top();
            if (target > 0 && ev.time > now_ && pending_count() >= static_cast<std::size_t>(target))
                return freeze();
            heap_.pop();
            now_ = ev.time;
            switch (ev.kind) {
                case EventKind::departure: on_departure(ev); break;
                case EventKind::arrival: on_arrival(ev); break;
                case EventKind::service_start: on_service_start(ev); break;
                case EventKind::reschedule_epoch:
                    if (target == 0) return freeze();
                    on_epoch(ev);
                    break;
            }
        }
        return std::nullopt;
    }

    void on_departure(const Event& ev) {
        auto& res = resources_[static_cast<std::size_t>(ev.tier)][static_cast<std::size_t>(
            ev.resource)];
        res.in_service.reset();
        JobTiming& t = trace_.at(ev.job);
        t.departures[static_cast<std::size_t>(ev.tier)] = now_;
        if (ev.tier + 1 < topo_.n_tiers) {
            heap_.push({now_, EventKind::arrival, ev.job, ev.tier + 1, 0});
        } else {
            t.total_wait = 0;
            for (TimeUnits w : t.waited) t.total_wait += w;
            t.response = now_ - stream_.jobs[static_cast<std::size_t>(ev.job) - 1].arrivals.front();
            --unfinished_;
        }
        if (!res.queue.empty())
            heap_.push({now_, EventKind::service_start, res.queue.front(), ev.tier, ev.resource});
    }

    void on_arrival(const Event& ev) {
        arrivals_[static_cast<std::size_t>(ev.job) - 1][static_cast<std::size_t>(ev.tier)] = now_;
        std::vector<QueueLoad> loads(static_cast<std::size_t>(topo_.n_resources));
        for (int q = 0; q < topo_.n_resources; ++q) {
            const auto& res = resources_[static_cast<std::size_t>(ev.tier)][static_cast<std::size_t>(q)];
            loads[static_cast<std::size_t>(q)] = {static_cast<int>(res.queue.size()),
                                                  res.in_service.has_value()};
        }
        const Job& job = stream_.jobs[static_cast<std::size_t>(ev.job) - 1];
        const int q = sched_.route(job, ev.tier, loads);
        if (q < 0 || q >= topo_.n_resources)
            throw InvariantError(sched_.name() + " routed job " + std::to_string(ev.job) +
                                 " to queue " + std::to_string(q));
        if (opts_.record_decisions)
            log_.push_back({Decision::Kind::route, now_, ev.job, ev.tier, q, {}});
        auto& res = resources_[static_cast<std::size_t>(ev.tier)][static_cast<std::size_t>(q)];
        res.queue.push_back(ev.job);
        // An epoch at this instant starts the queues itself, after rescheduling.
        if (!res.in_service && res.queue.size() == 1 && !epoch_times_.count(now_))
            heap_.push({now_, EventKind::service_start, ev.job, ev.tier, q});
    }

    void on_service_start(const Event& ev) {
        auto& res = resources_[static_cast<std::size_t>(ev.tier)][static_cast<std::size_t>(
            ev.resource)];
        if (res.in_service || res.queue.empty()) return;  // superseded wake-up
        start_head(ev.tier, ev.resource);
    }

    void start_head(int tier, int resource) {
        auto& res = resources_[static_cast<std::size_t>(tier)][static_cast<std::size_t>(resource)];
        const JobId id = res.queue.front();
        res.queue.pop_front();
        res.in_service = id;
        const Job& job = stream_.jobs[static_cast<std::size_t>(id) - 1];
        const TimeUnits exec = job.exec_times[static_cast<std::size_t>(tier)];
        res.busy_until = now_ + exec;
        JobTiming& t = trace_.at(id);
        t.waited[static_cast<std::size_t>(tier)] =
            now_ - arrivals_[static_cast<std::size_t>(id) - 1][static_cast<std::size_t>(tier)];
        t.served_by[static_cast<std::size_t>(tier)] = resource;
        heap_.push({res.busy_until, EventKind::departure, id, tier, resource});
    }

    void on_epoch(const Event&) {
        epoch_times_.erase(now_);
        if (pending_count() > 0) {
            const Snapshot snap = freeze();
            if (auto schedule = sched_.reschedule(snap)) {
                apply_schedule(snap, *schedule);
                if (opts_.record_decisions)
                    log_.push_back({Decision::Kind::reorder, now_, 0, 0, 0, std::move(*schedule)});
            } else if (opts_.record_decisions) {
                log_.push_back({Decision::Kind::reorder, now_, 0, 0, 0, snapshot_schedule(snap)});
            }
        }
        for (int tier = 0; tier < topo_.n_tiers; ++tier)
            for (int q = 0; q < topo_.n_resources; ++q) {
                auto& res = resources_[static_cast<std::size_t>(tier)][static_cast<std::size_t>(q)];
                if (!res.in_service && !res.queue.empty())
                    heap_.push({now_, EventKind::service_start, res.queue.front(), tier, q});
            }
        if (epochs_.period > 0 && unfinished_ > 0) push_epoch(now_ + epochs_.period);
    }

    void apply_schedule(const Snapshot& snap, const Schedule& schedule) {
        try {
            validate_candidate_schedule(snap, schedule);
        } catch (const InvariantError& err) {
            throw InvariantError(sched_.name() + " returned an invalid schedule at t=" +
                                 std::to_string(now_) + ": " + err.what());
        }
        for (int tier = 0; tier < topo_.n_tiers; ++tier)
            for (int q = 0; q < topo_.n_resources; ++q) {
                const auto& order =
                    schedule.tiers[static_cast<std::size_t>(tier)].queues[static_cast<std::size_t>(q)];
                auto& res = resources_[static_cast<std::size_t>(tier)][static_cast<std::size_t>(q)];
                res.queue.assign(order.begin(), order.end());
            }
    }

    std::size_t pending_count() const {
        std::size_t n = 0;
        for (const auto& tier : resources_)
            for (const auto& res : tier) n += res.queue.size();
        return n;
    }

    Snapshot freeze() const {
        Snapshot snap;
        snap.now = now_;
        snap.n_tiers = topo_.n_tiers;
        snap.n_queues_per_tier = topo_.n_resources;
        for (int tier = 0; tier < topo_.n_tiers; ++tier)
            for (int q = 0; q < topo_.n_resources; ++q) {
                const auto& res =
                    resources_[static_cast<std::size_t>(tier)][static_cast<std::size_t>(q)];
                SnapshotQueue sq;
                sq.tier = tier;
                sq.queue = q;
                sq.in_service = res.in_service;
                sq.residual = res.in_service ? res.busy_until - now_ : 0;
                sq.pending.assign(res.queue.begin(), res.queue.end());
                for (JobId id : sq.pending) snap.jobs.push_back(freeze_job(id, tier));
                snap.queues.push_back(std::move(sq));
            }
        std::sort(snap.jobs.begin(), snap.jobs.end(),
                  [](const SnapshotJob& a, const SnapshotJob& b) { return a.id < b.id; });
        return snap;
    }

    SnapshotJob freeze_job(JobId id, int tier) const {
        const Job& job = stream_.jobs[static_cast<std::size_t>(id) - 1];
        const JobTiming& t = trace_.jobs[static_cast<std::size_t>(id) - 1];
        SnapshotJob sj;
        sj.id = id;
        sj.tier = tier;
        sj.exec_here = job.exec_times[static_cast<std::size_t>(tier)];
        sj.service_cost = job.service_cost;
        sj.violation_cost = job.violation_cost;
        sj.elapsed =
            now_ - arrivals_[static_cast<std::size_t>(id) - 1][static_cast<std::size_t>(tier)];
        sj.allowance = job.allowance();
        sj.tier_allow_here = tier_allowance(job, tier);
        sj.waited_prior = 0;
        sj.prior_tier_alpha = 0.0;
        for (int j = 0; j < tier; ++j) {
            sj.waited_prior += t.waited[static_cast<std::size_t>(j)];
            sj.prior_tier_alpha +=
                static_cast<double>(t.waited[static_cast<std::size_t>(j)]) - tier_allowance(job, j);
        }
        return sj;
    }

    SimReport finish() {
        SimReport report;
        report.trace = std::move(trace_);
        report.decisions = std::move(log_);
        report.convergence = sched_.take_convergence();
        summarize(report);
        return report;
    }

    void summarize(SimReport& report) const {
        // Reported metrics are always cost-weighted, whatever the strategy
        // optimized internally.
        PenaltyParams metric = opts_.penalty;
        metric.differentiated = true;

        report.totals.entity = "system";
        report.tier_totals.assign(static_cast<std::size_t>(topo_.n_tiers), {});
        report.queue_totals.assign(
            static_cast<std::size_t>(topo_.n_tiers) * static_cast<std::size_t>(topo_.n_resources),
            {});
        char buf[64];
        for (int tier = 0; tier < topo_.n_tiers; ++tier) {
            std::snprintf(buf, sizeof(buf), "tier %d", tier + 1);
            report.tier_totals[static_cast<std::size_t>(tier)].entity = buf;
            for (int q = 0; q < topo_.n_resources; ++q) {
                std::snprintf(buf, sizeof(buf), "tier %d queue %d", tier + 1, q + 1);
                report
                    .queue_totals[static_cast<std::size_t>(tier) *
                                      static_cast<std::size_t>(topo_.n_resources) +
                                  static_cast<std::size_t>(q)]
                    .entity = buf;
            }
        }

        for (const Job& job : stream_.jobs) {
            const JobTiming& t = report.trace.jobs[static_cast<std::size_t>(job.id) - 1];
            const TimeUnits alpha = *t.response - job.deadline();
            report.totals.jobs += 1;
            report.totals.waiting += t.total_wait;
            report.totals.weighted_waiting +=
                job.service_cost * static_cast<double>(t.total_wait);
            report.totals.violation += static_cast<double>(std::max<TimeUnits>(alpha, 0));
            report.totals.weighted_violation +=
                job.violation_cost * static_cast<double>(std::max<TimeUnits>(alpha, 0));
            report.totals.penalty_waiting += waiting_penalty(job, t.total_wait, metric);
            report.totals.penalty_sla += sla_penalty(job, alpha, metric);

            for (int tier = 0; tier < topo_.n_tiers; ++tier) {
                const TimeUnits w = t.waited[static_cast<std::size_t>(tier)];
                const double tier_alpha =
                    static_cast<double>(w) - tier_allowance(job, tier);
                Totals& tt = report.tier_totals[static_cast<std::size_t>(tier)];
                Totals& qt =
                    report.queue_totals[static_cast<std::size_t>(tier) *
                                            static_cast<std::size_t>(topo_.n_resources) +
                                        static_cast<std::size_t>(
                                            t.served_by[static_cast<std::size_t>(tier)])];
                for (Totals* g : {&tt, &qt}) {
                    g->jobs += 1;
                    g->waiting += w;
                    g->weighted_waiting += job.service_cost * static_cast<double>(w);
                    g->violation += std::max(tier_alpha, 0.0);
                    g->weighted_violation += job.violation_cost * std::max(tier_alpha, 0.0);
                    g->penalty_waiting += waiting_penalty(job, w, metric);
                    g->penalty_sla += metric.chi * (1.0 - std::exp(-metric.nu * job.violation_cost *
                                                                   std::max(tier_alpha, 0.0)));
                }
            }
        }
    }

    const JobStream& stream_;
    Topology topo_;
    SchedulerBase& sched_;
    EpochPolicy epochs_;
    SimOptions opts_;

    std::priority_queue<Event, std::vector<Event>, EventAfter> heap_;
    std::vector<std::vector<Resource>> resources_;      // [tier][resource]
    std::vector<std::vector<TimeUnits>> arrivals_;      // [job-1][tier]
    TimingTrace trace_;
    DecisionLog log_;
    std::set<TimeUnits> epoch_times_;  // scheduled, not yet processed
    TimeUnits now_ = 0;
    int unfinished_ = 0;
};

}  // namespace

SimReport run(const JobStream& stream, const Topology& topo, SchedulerBase& scheduler,
              const EpochPolicy& epochs, const SimOptions& options) {
    Engine engine(stream, topo, scheduler, epochs, options);
    return engine.run_to_completion();
}

Snapshot build_snapshot(const JobStream& stream, const Topology& topo, SchedulerBase& scheduler,
                        int backlog_target) {
    EpochPolicy epochs;
    epochs.on_batch_arrival = backlog_target == 0;
    epochs.period = 0;
    SimOptions options;
    options.record_decisions = false;
    Engine engine(stream, topo, scheduler, epochs, options);
    return engine.run_to_backlog(backlog_target);
}

std::string trace_to_text(const SimReport& report, const JobStream& stream,
                          const PenaltyParams& params) {
    PenaltyParams metric = params;
    metric.differentiated = true;
    std::ostringstream out;
    const int n_tiers = stream.config.n_tiers;
    out << "tiersched-trace v1\n";
    out << "columns id";
    for (int j = 1; j <= n_tiers; ++j)
        out << " arrival" << j << " departure" << j << " wait" << j << " queue" << j;
    out << " response alpha eta_waiting eta_sla\n";
    char buf[64];
    for (const Job& job : stream.jobs) {
        const JobTiming& t = report.trace.jobs[static_cast<std::size_t>(job.id) - 1];
        out << t.id;
        TimeUnits arrival = job.arrivals.front();
        for (int j = 0; j < n_tiers; ++j) {
            const TimeUnits dep = t.departures[static_cast<std::size_t>(j)];
            out << ' ' << arrival << ' ' << dep << ' ' << t.waited[static_cast<std::size_t>(j)]
                << ' ' << t.served_by[static_cast<std::size_t>(j)] + 1;
            arrival = dep;  // next tier receives the job as it departs
        }
        const TimeUnits alpha = *t.response - job.deadline();
        out << ' ' << *t.response << ' ' << alpha;
        std::snprintf(buf, sizeof(buf), " %.17g", waiting_penalty(job, t.total_wait, metric));
        out << buf;
        std::snprintf(buf, sizeof(buf), " %.17g", sla_penalty(job, alpha, metric));
        out << buf << '\n';
    }
    return out.str();
}

}  // namespace tiersched
