#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <random>

#include "tiersched/baselines.hpp"

using namespace tiersched;

TEST_CASE("least connections picks the emptiest queue, lowest index on ties") {
    DispatchRule wlc({BaselinePolicy::wlc, {}});
    // loads (2,1,1): queues 2 and 3 tie, the lower index wins
    CHECK(wlc.pick({{2, false}, {1, false}, {1, false}}) == 1);
    // an executing job counts as a connection
    CHECK(wlc.pick({{0, true}, {1, false}, {0, false}}) == 2);
    CHECK(wlc.pick({{0, true}, {0, false}, {1, false}}) == 1);
}

TEST_CASE("weighted least connections divides by weight") {
    DispatchRule wlc({BaselinePolicy::wlc, {1.0, 3.0}});
    // 3/1 vs 4/3: the heavier queue is relatively emptier
    CHECK(wlc.pick({{3, false}, {4, false}}) == 1);
}

TEST_CASE("round robin cycles the queues") {
    DispatchRule wrr({BaselinePolicy::wrr, {}});
    const std::vector<QueueLoad> loads(3);
    std::vector<int> picks;
    for (int i = 0; i < 6; ++i) picks.push_back(wrr.pick(loads));
    CHECK(picks == std::vector<int>{0, 1, 2, 0, 1, 2});
}

TEST_CASE("weighted round robin repeats by weight") {
    DispatchRule wrr({BaselinePolicy::wrr, {2.0, 1.0}});
    const std::vector<QueueLoad> loads(2);
    std::vector<int> picks;
    for (int i = 0; i < 6; ++i) picks.push_back(wrr.pick(loads));
    CHECK(picks == std::vector<int>{0, 0, 1, 0, 0, 1});
}

TEST_CASE("a single queue takes everything") {
    for (BaselinePolicy policy :
         {BaselinePolicy::fcfs, BaselinePolicy::wlc, BaselinePolicy::wrr}) {
        DispatchRule rule({policy, {}});
        for (int i = 0; i < 5; ++i) CHECK(rule.pick({{i, i % 2 == 0}}) == 0);
    }
}

TEST_CASE("fcfs spreads ties round robin") {
    DispatchRule fcfs({BaselinePolicy::fcfs, {}});
    std::vector<QueueLoad> loads(3);
    std::vector<int> seen;
    for (int i = 0; i < 3; ++i) {
        const int q = fcfs.pick(loads);
        seen.push_back(q);
        loads[static_cast<std::size_t>(q)].queued += 1;
    }
    CHECK(seen == std::vector<int>{0, 1, 2});
    // queue 1 drains; the next tie among {1} at load 0 goes there
    loads[1].queued = 0;
    CHECK(fcfs.pick(loads) == 1);
}

TEST_CASE("equal-weight round robin keeps counts within one") {
    std::mt19937 rng(3);
    for (int round = 0; round < 200; ++round) {
        const int n = 2 + static_cast<int>(rng() % 5);
        DispatchRule wrr({BaselinePolicy::wrr, {}});
        std::vector<int> counts(static_cast<std::size_t>(n), 0);
        const int arrivals = 1 + static_cast<int>(rng() % 40);
        for (int i = 0; i < arrivals; ++i)
            counts[static_cast<std::size_t>(wrr.pick(std::vector<QueueLoad>(
                static_cast<std::size_t>(n))))] += 1;
        const auto [lo, hi] = std::minmax_element(counts.begin(), counts.end());
        CHECK(*hi - *lo <= 1);
    }
}

TEST_CASE("baseline weights must be positive and sized to the tier") {
    BaselineKind bad{BaselinePolicy::wlc, {1.0, 0.0}};
    CHECK_THROWS_AS(bad.validate(2), InvariantError);
    BaselineKind wrong_size{BaselinePolicy::wlc, {1.0}};
    CHECK_THROWS_AS(wrong_size.validate(2), InvariantError);
    BaselineKind ok{BaselinePolicy::wlc, {1.0, 2.0}};
    CHECK_NOTHROW(ok.validate(2));
}

TEST_CASE("baseline names round-trip") {
    for (BaselinePolicy policy :
         {BaselinePolicy::fcfs, BaselinePolicy::wlc, BaselinePolicy::wrr})
        CHECK(baseline_from_name(to_string(policy)) == policy);
    CHECK_THROWS_AS((void)baseline_from_name("sjf"), InvariantError);
}
