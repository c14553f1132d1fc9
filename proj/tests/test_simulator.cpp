#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <map>

#include "tiersched/oracle.hpp"
#include "tiersched/simulator.hpp"

using namespace tiersched;

namespace {

JobStream manual_stream(int n_tiers, std::vector<std::vector<TimeUnits>> exec,
                        std::vector<TimeUnits> arrivals = {}) {
    JobStream stream;
    stream.config.n_tiers = n_tiers;
    stream.config.n_jobs = static_cast<int>(exec.size());
    for (std::size_t i = 0; i < exec.size(); ++i) {
        Job job;
        job.id = static_cast<JobId>(i + 1);
        job.exec_times = exec[i];
        job.arrivals.assign(static_cast<std::size_t>(n_tiers), kUnknownTime);
        job.arrivals.front() = arrivals.empty() ? 0 : arrivals[i];
        job.target_completion = job.arrivals.front() + job.total_exec() + 100000;
        stream.jobs.push_back(job);
    }
    return stream;
}

/// Imposes a caller-chosen ordering at the first epoch, then stays quiet.
class FixedOrderScheduler : public SchedulerBase {
  public:
    explicit FixedOrderScheduler(Schedule schedule) : schedule_(std::move(schedule)) {}
    std::string name() const override { return "fixed-order"; }
    int route(const Job&, int, const std::vector<QueueLoad>&) override { return 0; }
    std::optional<Schedule> reschedule(const Snapshot&) override {
        if (applied_) return std::nullopt;
        applied_ = true;
        return schedule_;
    }

  private:
    Schedule schedule_;
    bool applied_ = false;
};

/// Shortest-demand-first within every queue at every epoch; never migrates.
class SptScheduler : public SchedulerBase {
  public:
    explicit SptScheduler(int n_tiers) {
        for (int j = 0; j < n_tiers; ++j) rules_.emplace_back(BaselineKind{BaselinePolicy::fcfs, {}});
    }
    std::string name() const override { return "spt"; }
    int route(const Job&, int tier, const std::vector<QueueLoad>& loads) override {
        return rules_[static_cast<std::size_t>(tier)].pick(loads);
    }
    std::optional<Schedule> reschedule(const Snapshot& snap) override {
        Schedule schedule = snapshot_schedule(snap);
        for (auto& tier : schedule.tiers)
            for (auto& queue : tier.queues)
                std::sort(queue.begin(), queue.end(), [&](JobId a, JobId b) {
                    const auto ea = snap.at(a).exec_here;
                    const auto eb = snap.at(b).exec_here;
                    return ea != eb ? ea < eb : a < b;
                });
        return schedule;
    }

  private:
    std::vector<DispatchRule> rules_;
};

SimReport run_fcfs(const JobStream& stream, const Topology& topo,
                   const EpochPolicy& epochs = {}) {
    BaselineScheduler fcfs({BaselinePolicy::fcfs, {}}, topo.n_tiers);
    return run(stream, topo, fcfs, epochs);
}

}  // namespace

TEST_CASE("a lone job never waits") {
    const JobStream stream = manual_stream(2, {{2, 3}});
    const SimReport report = run_fcfs(stream, {2, 3});
    const JobTiming& t = report.trace.jobs[0];
    CHECK(t.waited == std::vector<TimeUnits>{0, 0});
    CHECK(t.total_wait == 0);
    CHECK(t.response == 5);
    CHECK(t.departures == std::vector<TimeUnits>{2, 5});
}

TEST_CASE("simultaneous arrivals queue in id order under fcfs") {
    const JobStream stream = manual_stream(1, {{5}, {3}, {4}});
    const SimReport report = run_fcfs(stream, {1, 1});
    CHECK(report.trace.jobs[0].waited[0] == 0);
    CHECK(report.trace.jobs[1].waited[0] == 5);
    CHECK(report.trace.jobs[2].waited[0] == 8);
    CHECK(report.totals.waiting == 13);
}

TEST_CASE("response times follow the imposed order") {
    const JobStream stream = manual_stream(1, {{5}, {3}});
    SUBCASE("arrival order") {
        const SimReport report = run_fcfs(stream, {1, 1});
        CHECK(report.trace.jobs[0].response == 5);
        CHECK(report.trace.jobs[1].response == 8);
        CHECK(report.trace.jobs[1].waited[0] == 5);
    }
    SUBCASE("reversed") {
        Schedule reversed;
        reversed.tiers.push_back({{{2, 1}}});
        FixedOrderScheduler sched(reversed);
        const SimReport report = run(stream, {1, 1}, sched, {});
        CHECK(report.trace.jobs[1].response == 3);
        CHECK(report.trace.jobs[0].response == 8);
        CHECK(report.trace.jobs[0].waited[0] == 3);
    }
}

TEST_CASE("an epoch reordering takes effect before service begins") {
    const JobStream stream = manual_stream(1, {{5}, {3}, {4}});
    Schedule shortest_first;
    shortest_first.tiers.push_back({{{2, 3, 1}}});
    FixedOrderScheduler sched(shortest_first);
    const SimReport report = run(stream, {1, 1}, sched, {});
    CHECK(report.trace.jobs[1].waited[0] == 0);
    CHECK(report.trace.jobs[2].waited[0] == 3);
    CHECK(report.trace.jobs[0].waited[0] == 7);
    CHECK(report.totals.waiting == 10);
    CHECK(report.trace.jobs[0].response == 12);
}

TEST_CASE("a schedule that drops a job aborts the run") {
    const JobStream stream = manual_stream(1, {{5}, {3}});
    Schedule bad;
    bad.tiers.push_back({{{2}}});
    FixedOrderScheduler sched(bad);
    CHECK_THROWS_AS((void)run(stream, {1, 1}, sched, {}), InvariantError);
}

TEST_CASE("without rescheduling departures follow queue order") {
    WorkloadConfig config;
    config.n_tiers = 1;
    config.n_resources = 2;
    config.n_jobs = 40;
    config.seed = 5;
    const JobStream stream = generate_stream(config);
    const SimReport report = run_fcfs(stream, {1, 2});

    // reconstruct each queue's arrival sequence from the route decisions
    std::map<int, std::vector<JobId>> queued;
    for (const Decision& d : report.decisions)
        if (d.kind == Decision::Kind::route) queued[d.queue].push_back(d.job);
    for (const auto& [queue, jobs] : queued) {
        std::vector<JobId> by_departure = jobs;
        std::sort(by_departure.begin(), by_departure.end(), [&](JobId a, JobId b) {
            return report.trace.at(a).departures[0] < report.trace.at(b).departures[0];
        });
        CHECK(by_departure == jobs);
    }
}

TEST_CASE("jobs enter the next tier the instant they depart") {
    WorkloadConfig config;
    config.n_tiers = 3;
    config.n_resources = 2;
    config.n_jobs = 60;
    config.seed = 17;
    config.arrival = ArrivalProcess::poisson;
    config.arrival_rate = 0.02;
    const JobStream stream = generate_stream(config);
    const SimReport report = run_fcfs(stream, {3, 2});

    for (const Job& job : stream.jobs) {
        const JobTiming& t = report.trace.jobs[static_cast<std::size_t>(job.id) - 1];
        TimeUnits arrival = job.arrivals.front();
        TimeUnits waited_total = 0;
        for (int j = 0; j < 3; ++j) {
            const TimeUnits start = arrival + t.waited[static_cast<std::size_t>(j)];
            CHECK(t.departures[static_cast<std::size_t>(j)] ==
                  start + job.exec_times[static_cast<std::size_t>(j)]);
            arrival = t.departures[static_cast<std::size_t>(j)];
            waited_total += t.waited[static_cast<std::size_t>(j)];
        }
        // end-to-end conservation, exact in integer time
        CHECK(*t.response == waited_total + job.total_exec());
        CHECK(t.total_wait == waited_total);
    }
}

TEST_CASE("identical runs serialize identically") {
    WorkloadConfig config;
    config.n_tiers = 2;
    config.n_resources = 3;
    config.n_jobs = 80;
    config.seed = 99;
    config.arrival = ArrivalProcess::poisson;
    const JobStream stream = generate_stream(config);

    SptScheduler a(2), b(2);
    const EpochPolicy epochs{true, 250};
    const SimReport ra = run(stream, {2, 3}, a, epochs);
    const SimReport rb = run(stream, {2, 3}, b, epochs);
    CHECK(trace_to_text(ra, stream, {}) == trace_to_text(rb, stream, {}));
    CHECK(ra.trace == rb.trace);
}

TEST_CASE("the replay oracle agrees with the event loop") {
    for (std::uint64_t seed : {1ULL, 2ULL, 3ULL}) {
        WorkloadConfig config;
        config.n_tiers = 2;
        config.n_resources = 2;
        config.n_jobs = 120;
        config.seed = seed;
        config.arrival = ArrivalProcess::poisson;
        config.arrival_rate = 0.015;
        const JobStream stream = generate_stream(config);

        SptScheduler sched(2);
        const SimReport report = run(stream, {2, 2}, sched, {false, 400});
        const TimingTrace replay = oracle_recompute(stream, {2, 2}, report.decisions);
        const auto mismatch = first_mismatch(report.trace, replay);
        if (mismatch) FAIL(mismatch->describe());
    }
}

TEST_CASE("the oracle agrees on a large poisson run") {
    WorkloadConfig config;
    config.n_tiers = 2;
    config.n_resources = 3;
    config.n_jobs = 1000;
    config.seed = 42;
    config.arrival = ArrivalProcess::poisson;
    config.arrival_rate = 0.02;
    const JobStream stream = generate_stream(config);
    const SimReport report = run_fcfs(stream, {2, 3}, {true, 0});
    const TimingTrace replay = oracle_recompute(stream, {2, 3}, report.decisions);
    CHECK_FALSE(first_mismatch(report.trace, replay).has_value());
}

TEST_CASE("a corrupted history surfaces the earliest affected job") {
    const JobStream stream = manual_stream(1, {{5}, {3}, {4}, {6}});
    const SimReport report = run_fcfs(stream, {1, 2}, {false, 0});

    DecisionLog corrupted = report.decisions;
    // swap the queue assignments of the first two routed jobs
    std::vector<std::size_t> routes;
    for (std::size_t i = 0; i < corrupted.size() && routes.size() < 2; ++i)
        if (corrupted[i].kind == Decision::Kind::route) routes.push_back(i);
    REQUIRE(routes.size() == 2);
    std::swap(corrupted[routes[0]].queue, corrupted[routes[1]].queue);

    const TimingTrace replay = oracle_recompute(stream, {1, 2}, corrupted);
    const auto mismatch = first_mismatch(report.trace, replay);
    REQUIRE(mismatch.has_value());
    CHECK(mismatch->job <= 2);  // jobs 1 and 2 diverge first
}

TEST_CASE("snapshots freeze the requested backlog") {
    WorkloadConfig config;
    config.n_tiers = 1;
    config.n_resources = 2;
    config.n_jobs = 50;
    config.seed = 8;
    config.arrival = ArrivalProcess::poisson;
    config.arrival_rate = 0.05;  // overloaded on purpose
    const JobStream stream = generate_stream(config);

    BaselineScheduler fcfs({BaselinePolicy::fcfs, {}}, 1);
    const Snapshot snap = build_snapshot(stream, {1, 2}, fcfs, 10);
    CHECK(snap.pending_count() >= 10);
    for (const SnapshotQueue& q : snap.queues) {
        if (!q.in_service) continue;
        CHECK(q.residual > 0);
        for (JobId id : q.pending) CHECK(id != *q.in_service);
    }
    for (const SnapshotJob& job : snap.jobs) CHECK(job.elapsed >= 0);
}

TEST_CASE("batch snapshots hold every job pending") {
    const JobStream stream = manual_stream(1, {{5}, {3}, {4}});
    BaselineScheduler fcfs({BaselinePolicy::fcfs, {}}, 1);
    const Snapshot snap = build_snapshot(stream, {1, 1}, fcfs, 0);
    CHECK(snap.now == 0);
    CHECK(snap.pending_count() == 3);
    CHECK_FALSE(snap.queues[0].in_service.has_value());
}
