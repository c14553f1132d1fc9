#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "tiersched/ga.hpp"
#include "tiersched/penalty.hpp"
#include "tiersched/simulator.hpp"
#include "tiersched/workload.hpp"

namespace tiersched {

/// How one strategy schedules: a pure dispatch baseline, or an evolutionary
/// scheduler over one of the three virtual-queue layouts. Written as
/// "fcfs" | "wlc" | "wrr" | "ga:<tier|system|segmented>:<fitness>[:diff|:nondiff]".
struct StrategySpec {
    enum class Kind { baseline, ga } kind = Kind::baseline;
    enum class Layout { tier, system, segmented } layout = Layout::tier;
    BaselinePolicy baseline = BaselinePolicy::fcfs;
    FitnessKind fitness = FitnessKind::waiting;
    std::optional<bool> differentiated;  // overrides the scenario penalty flag
    std::string text;

    static StrategySpec parse(const std::string& text);
};

/// One experiment: a workload template, the environment shape, the
/// strategies to face off, and how many seeded replications to run.
/// `snapshot` mode freezes a backlog and scores schedules in place;
/// `stream` mode runs every job to completion.
struct Scenario {
    int schema_version = 1;
    std::string name = "scenario";
    WorkloadConfig workload;
    std::optional<std::pair<int, int>> n_jobs_range;  // per-replication size draw
    Topology topology;
    std::vector<StrategySpec> strategies;
    GAConfig ga;
    PenaltyParams penalty;
    EpochPolicy epochs;
    enum class Mode { stream, snapshot } mode = Mode::stream;
    int backlog_target = 0;  // snapshot mode; 0 freezes the opening batch
    int replications = 30;
    std::string output_dir;
    std::string output_format = "jsonl";

    void validate() const;
    static Scenario from_json_text(const std::string& text);
    static Scenario load(const std::filesystem::path& path);
};

}  // namespace tiersched
