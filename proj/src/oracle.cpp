#include "tiersched/oracle.hpp"

#include <algorithm>
#include <limits>
#include <vector>

namespace tiersched {

namespace {

constexpr TimeUnits kFar = std::numeric_limits<TimeUnits>::max();

struct ReplayResource {
    std::vector<JobId> queue;
    std::optional<JobId> in_service;
    TimeUnits busy_until = kFar;
};

}  // namespace

TimingTrace oracle_recompute(const JobStream& stream, const Topology& topo,
                             const DecisionLog& decisions) {
    const int n_tiers = topo.n_tiers;
    const int n_res = topo.n_resources;
    const std::size_t n_jobs = stream.jobs.size();

    std::vector<std::vector<ReplayResource>> res(
        static_cast<std::size_t>(n_tiers),
        std::vector<ReplayResource>(static_cast<std::size_t>(n_res)));
    std::vector<std::vector<TimeUnits>> arrival(
        n_jobs, std::vector<TimeUnits>(static_cast<std::size_t>(n_tiers), kUnknownTime));
    for (std::size_t i = 0; i < n_jobs; ++i) arrival[i][0] = stream.jobs[i].arrivals.front();

    TimingTrace trace;
    trace.jobs.resize(n_jobs);
    for (std::size_t i = 0; i < n_jobs; ++i) {
        JobTiming& t = trace.jobs[i];
        t.id = static_cast<JobId>(i + 1);
        t.waited.assign(static_cast<std::size_t>(n_tiers), 0);
        t.departures.assign(static_cast<std::size_t>(n_tiers), kUnknownTime);
        t.served_by.assign(static_cast<std::size_t>(n_tiers), -1);
    }

    auto exec_of = [&](JobId id, int tier) {
        return stream.jobs[static_cast<std::size_t>(id) - 1]
            .exec_times[static_cast<std::size_t>(tier)];
    };
    auto start_head = [&](int tier, int q, TimeUnits now) {
        auto& r = res[static_cast<std::size_t>(tier)][static_cast<std::size_t>(q)];
        const JobId id = r.queue.front();
        r.queue.erase(r.queue.begin());
        r.in_service = id;
        r.busy_until = now + exec_of(id, tier);
        JobTiming& t = trace.jobs[static_cast<std::size_t>(id) - 1];
        const TimeUnits when = arrival[static_cast<std::size_t>(id) - 1][static_cast<std::size_t>(tier)];
        t.waited[static_cast<std::size_t>(tier)] = now - when;
        t.served_by[static_cast<std::size_t>(tier)] = q;
    };

    std::size_t cursor = 0;  // next unapplied decision
    int unfinished = static_cast<int>(n_jobs);
    std::vector<std::pair<int, int>> freed_nonempty;

    while (unfinished > 0) {
        // Next instant anything can happen: a service completes or a
        // recorded decision takes effect.
        TimeUnits now = kFar;
        for (const auto& tier : res)
            for (const auto& r : tier)
                if (r.in_service) now = std::min(now, r.busy_until);
        if (cursor < decisions.size()) now = std::min(now, decisions[cursor].time);
        if (now == kFar) break;  // starved: a corrupted log can strand jobs

        // Completions first; note which freed resources already had queued
        // work, they restart before any same-instant reordering.
        freed_nonempty.clear();
        for (int tier = 0; tier < n_tiers; ++tier)
            for (int q = 0; q < n_res; ++q) {
                auto& r = res[static_cast<std::size_t>(tier)][static_cast<std::size_t>(q)];
                if (!r.in_service || r.busy_until != now) continue;
                const JobId id = *r.in_service;
                r.in_service.reset();
                r.busy_until = kFar;
                trace.jobs[static_cast<std::size_t>(id) - 1]
                    .departures[static_cast<std::size_t>(tier)] = now;
                if (tier + 1 < n_tiers)
                    arrival[static_cast<std::size_t>(id) - 1][static_cast<std::size_t>(tier) + 1] =
                        now;
                else
                    --unfinished;
                if (!r.queue.empty()) freed_nonempty.emplace_back(tier, q);
            }

        // Route decisions of this instant, in recorded order.
        bool epoch_here = false;
        std::size_t reorder_at = decisions.size();
        while (cursor < decisions.size() && decisions[cursor].time == now) {
            const Decision& d = decisions[cursor];
            if (d.kind == Decision::Kind::route) {
                res[static_cast<std::size_t>(d.tier)][static_cast<std::size_t>(d.queue)]
                    .queue.push_back(d.job);
            } else {
                epoch_here = true;
                reorder_at = cursor;
            }
            ++cursor;
        }

        if (epoch_here) {
            // Only completion-freed queues start ahead of the reorder.
            for (auto [tier, q] : freed_nonempty) {
                auto& r = res[static_cast<std::size_t>(tier)][static_cast<std::size_t>(q)];
                if (!r.in_service && !r.queue.empty()) start_head(tier, q, now);
            }
            const Schedule& schedule = decisions[reorder_at].schedule;
            for (int tier = 0; tier < n_tiers && tier < static_cast<int>(schedule.tiers.size());
                 ++tier)
                for (int q = 0; q < n_res &&
                                q < static_cast<int>(
                                        schedule.tiers[static_cast<std::size_t>(tier)].queues.size());
                     ++q)
                    res[static_cast<std::size_t>(tier)][static_cast<std::size_t>(q)].queue =
                        schedule.tiers[static_cast<std::size_t>(tier)]
                            .queues[static_cast<std::size_t>(q)];
        }

        for (int tier = 0; tier < n_tiers; ++tier)
            for (int q = 0; q < n_res; ++q) {
                auto& r = res[static_cast<std::size_t>(tier)][static_cast<std::size_t>(q)];
                if (!r.in_service && !r.queue.empty()) start_head(tier, q, now);
            }
    }

    for (std::size_t i = 0; i < n_jobs; ++i) {
        JobTiming& t = trace.jobs[i];
        if (t.departures.back() == kUnknownTime) continue;
        t.total_wait = 0;
        for (TimeUnits w : t.waited) t.total_wait += w;
        t.response = t.departures.back() - stream.jobs[i].arrivals.front();
    }
    return trace;
}

std::string TraceMismatch::describe() const {
    return "job " + std::to_string(job) + " tier " + std::to_string(tier + 1) + " " + field +
           ": expected " + std::to_string(expected) + ", got " + std::to_string(got);
}

std::optional<TraceMismatch> first_mismatch(const TimingTrace& expected,
                                            const TimingTrace& actual) {
    std::optional<TraceMismatch> best;
    TimeUnits best_when = kFar;
    auto consider = [&](TimeUnits when, TraceMismatch m) {
        if (!best || when < best_when) {
            best = std::move(m);
            best_when = when;
        }
    };
    const std::size_t n = std::min(expected.jobs.size(), actual.jobs.size());
    for (std::size_t i = 0; i < n; ++i) {
        const JobTiming& a = expected.jobs[i];
        const JobTiming& b = actual.jobs[i];
        for (std::size_t j = 0; j < a.departures.size(); ++j) {
            const TimeUnits da = a.departures[j];
            const TimeUnits db = b.departures[j];
            const TimeUnits when = std::min(da == kUnknownTime ? kFar : da,
                                            db == kUnknownTime ? kFar : db);
            if (da != db)
                consider(when, {a.id, static_cast<int>(j), "departure", da, db});
            else if (a.waited[j] != b.waited[j])
                consider(when, {a.id, static_cast<int>(j), "wait", a.waited[j], b.waited[j]});
            else if (a.served_by[j] != b.served_by[j])
                consider(when, {a.id, static_cast<int>(j), "queue", a.served_by[j], b.served_by[j]});
        }
    }
    if (expected.jobs.size() != actual.jobs.size())
        consider(kFar - 1, {static_cast<JobId>(n + 1), 0, "departure", 0, 0});
    return best;
}

}  // namespace tiersched
