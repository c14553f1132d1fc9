#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <random>

#include "tiersched/snapshot.hpp"
#include "tiersched/timing.hpp"

using namespace tiersched;

namespace {

Job make_job(JobId id, std::vector<TimeUnits> exec, TimeUnits arrival = 0,
             TimeUnits allowance = 1000) {
    Job job;
    job.id = id;
    job.exec_times = std::move(exec);
    job.arrivals.assign(job.exec_times.size(), kUnknownTime);
    job.arrivals.front() = arrival;
    job.target_completion = arrival + job.total_exec() + allowance;
    return job;
}

}  // namespace

TEST_CASE("remaining queue waits follow the predecessor sums") {
    const std::unordered_map<JobId, TimeUnits> exec{{3, 4}, {5, 1}, {2, 6}};
    const std::vector<JobId> order{3, 5, 2};
    const auto waits = queue_waiting_times(order, exec);
    REQUIRE(waits.size() == 3);
    CHECK(waits[0] == 0);
    CHECK(waits[1] == 4);
    CHECK(waits[2] == 5);
}

TEST_CASE("a lone job on an idle resource waits nothing") {
    const std::unordered_map<JobId, TimeUnits> exec{{7, 9}};
    const std::vector<JobId> order{7};
    CHECK(queue_waiting_times(order, exec) == std::vector<TimeUnits>{0});
}

TEST_CASE("the in-service residual delays every queued job") {
    const std::unordered_map<JobId, TimeUnits> exec{{1, 5}, {2, 3}};
    const std::vector<JobId> order{1, 2};
    const auto waits = queue_waiting_times(order, exec, 2);
    CHECK(waits == std::vector<TimeUnits>{2, 7});

    const auto bare = queue_waiting_times(order, exec, 2, ResidualPolicy::ignore_in_service);
    CHECK(bare == std::vector<TimeUnits>{0, 5});
}

TEST_CASE("unknown job ids are rejected by name") {
    const std::unordered_map<JobId, TimeUnits> exec{{1, 5}};
    const std::vector<JobId> order{1, 42};
    try {
        queue_waiting_times(order, exec);
        FAIL("expected UnknownJobError");
    } catch (const UnknownJobError& err) {
        CHECK(err.id() == 42);
        CHECK(std::string(err.what()).find("42") != std::string::npos);
    }
}

TEST_CASE("queue waits are monotone under promotion") {
    // moving a job one slot toward the head never increases its remaining wait
    std::mt19937 rng(7);
    for (int round = 0; round < 1000; ++round) {
        const int n = 2 + static_cast<int>(rng() % 8);
        std::unordered_map<JobId, TimeUnits> exec;
        std::vector<JobId> order;
        for (int i = 1; i <= n; ++i) {
            exec[i] = 1 + static_cast<TimeUnits>(rng() % 50);
            order.push_back(i);
        }
        std::shuffle(order.begin(), order.end(), rng);
        const TimeUnits residual = static_cast<TimeUnits>(rng() % 20);
        const auto before = queue_waiting_times(order, exec, residual);
        const std::size_t pos = 1 + rng() % (n - 1);
        const JobId moved = order[pos];
        std::swap(order[pos], order[pos - 1]);
        const auto after = queue_waiting_times(order, exec, residual);
        CHECK(after[pos - 1] <= before[pos]);
        (void)moved;
    }
}

TEST_CASE("queue waits conserve work across positions") {
    // consecutive differences recompute the predecessor demands exactly
    std::mt19937 rng(11);
    for (int round = 0; round < 1000; ++round) {
        const int n = 1 + static_cast<int>(rng() % 9);
        std::unordered_map<JobId, TimeUnits> exec;
        std::vector<JobId> order;
        for (int i = 1; i <= n; ++i) {
            exec[i] = 1 + static_cast<TimeUnits>(rng() % 100);
            order.push_back(i);
        }
        std::shuffle(order.begin(), order.end(), rng);
        const auto waits = queue_waiting_times(order, exec);
        TimeUnits recomputed = 0;
        for (std::size_t k = 0; k < order.size(); ++k) {
            CHECK(waits[k] == recomputed);
            recomputed += exec.at(order[k]);
        }
    }
}

TEST_CASE("response time reads the last departure") {
    Job job = make_job(1, {2, 3});
    TimingTrace trace;
    trace.jobs.push_back({1, {0, 0}, {2, 5}, {0, 0}, 0, 5, 0, 0, 0.0, 0.0});

    SUBCASE("departed") {
        const auto rt = response_time(trace, job);
        REQUIRE(rt.has_value());
        CHECK(*rt == 5);
    }
    SUBCASE("still in flight") {
        trace.jobs[0].departures.back() = kUnknownTime;
        CHECK_FALSE(response_time(trace, job).has_value());
    }
}

TEST_CASE("expected multi-tier wait sums the three components") {
    CHECK(expected_multitier_wait(0, 0, 0) == 0.0);
    CHECK(expected_multitier_wait(4, 2, 7) == 13.0);
    CHECK(expected_multitier_wait(0, 3, 6) == 9.0);
}

TEST_CASE("expected waits over a snapshot") {
    Snapshot snap;
    snap.now = 10;
    snap.n_tiers = 2;
    snap.n_queues_per_tier = 1;
    snap.queues.push_back({0, 0, std::nullopt, 0, {}});
    snap.queues.push_back({1, 0, std::nullopt, 0, {5, 9}});
    snap.jobs.push_back({5, 1, 6, 1.0, 1.0, 2, 4, 100, 50.0, -1.0});
    snap.jobs.push_back({9, 1, 3, 1.0, 1.0, 1, 0, 80, 40.0, 0.0});

    CHECK(snapshot_remaining_wait(snap, 5) == 0);
    CHECK(snapshot_remaining_wait(snap, 9) == 6);
    CHECK(expected_multitier_wait(snap, 5) == doctest::Approx(6.0));   // 4 + 2 + 0
    CHECK(expected_multitier_wait(snap, 9) == doctest::Approx(7.0));   // 0 + 1 + 6
    CHECK(expected_tier_wait(snap, 9) == doctest::Approx(7.0));
    CHECK_THROWS_AS((void)expected_multitier_wait(snap, 123), UnknownJobError);
}

TEST_CASE("per-tier allowance splits by execution share") {
    SUBCASE("two tiers") {
        Job job = make_job(1, {2, 3}, 0, 100);
        CHECK(tier_allowance(job, 0) == doctest::Approx(40.0));
        CHECK(tier_allowance(job, 1) == doctest::Approx(60.0));
    }
    SUBCASE("single tier keeps the whole budget") {
        Job job = make_job(1, {17}, 0, 345);
        CHECK(tier_allowance(job, 0) == doctest::Approx(345.0));
    }
    SUBCASE("equal demands share equally") {
        Job job = make_job(1, {9, 9, 9, 9}, 0, 80);
        for (int j = 0; j < 4; ++j) CHECK(tier_allowance(job, j) == doctest::Approx(20.0));
    }
    SUBCASE("missing tier is rejected") {
        Job job = make_job(1, {2, 3});
        CHECK_THROWS_AS((void)tier_allowance(job, 2), InvariantError);
    }
}

TEST_CASE("allowance partition sums back to the whole") {
    std::mt19937 rng(23);
    for (int round = 0; round < 1000; ++round) {
        const int n_tiers = 1 + static_cast<int>(rng() % 4);
        std::vector<TimeUnits> exec;
        for (int j = 0; j < n_tiers; ++j) exec.push_back(1 + static_cast<TimeUnits>(rng() % 500));
        Job job = make_job(1, exec, static_cast<TimeUnits>(rng() % 100),
                           1 + static_cast<TimeUnits>(rng() % 10000));
        const Allowances a = compute_allowances(job);
        double together = 0.0;
        for (double share : a.per_tier) together += share;
        CHECK(together == doctest::Approx(static_cast<double>(a.multitier)).epsilon(1e-9));
        CHECK(a.deadline == job.deadline());
    }
}

TEST_CASE("job contract rejections") {
    CHECK_NOTHROW(validate_job(make_job(1, {5, 5}), 2));
    SUBCASE("tier count") { CHECK_THROWS_AS(validate_job(make_job(1, {5}), 2), InvariantError); }
    SUBCASE("nonpositive demand") {
        CHECK_THROWS_AS(validate_job(make_job(1, {5, 0}), 2), InvariantError);
    }
    SUBCASE("no allowance") {
        Job job = make_job(1, {5, 5}, 0, 0);
        CHECK_THROWS_AS(validate_job(job, 2), InvariantError);
    }
    SUBCASE("costs") {
        Job job = make_job(1, {5, 5});
        job.service_cost = 0.0;
        CHECK_THROWS_AS(validate_job(job, 2), InvariantError);
    }
}
