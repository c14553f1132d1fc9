#pragma once

#include <optional>
#include <string>

#include "tiersched/simulator.hpp"

namespace tiersched {

/// Recomputes the whole timing trace from the stream and the recorded
/// scheduling decisions alone. The replay is a chronological scan over
/// queue states, deliberately sharing no machinery with the event-heap
/// simulator, and must agree with it exactly.
TimingTrace oracle_recompute(const JobStream& stream, const Topology& topo,
                             const DecisionLog& decisions);

struct TraceMismatch {
    JobId job = 0;
    int tier = 0;
    std::string field;  // "departure" | "wait" | "queue"
    TimeUnits expected = 0;
    TimeUnits got = 0;

    std::string describe() const;
};

/// Earliest divergence between two traces, by realized departure time, or
/// nothing when they agree on every job.
std::optional<TraceMismatch> first_mismatch(const TimingTrace& expected,
                                            const TimingTrace& actual);

}  // namespace tiersched
