#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "tiersched/types.hpp"

namespace tiersched {

enum class ArrivalProcess {
    batch_at_zero,
    poisson,
};

/// Parameters of a randomized job stream. `cost_mean`/`cost_var` shape the
/// normal draw of both cost coefficients; by convention `cost_var` is a
/// variance, set `cost_var_is_stddev` to read it as a standard deviation.
/// The waiting allowance of each job is a uniform multiple of its total
/// execution time drawn from [slack_lo, slack_hi].
struct WorkloadConfig {
    int n_tiers = 1;
    int n_resources = 1;
    int n_jobs = 1;
    std::uint64_t seed = 0;
    ArrivalProcess arrival = ArrivalProcess::batch_at_zero;
    double arrival_rate = 0.01;  // poisson only, jobs per time unit
    TimeUnits exec_lo = 50;
    TimeUnits exec_hi = 500;
    double cost_mean = 1000.0;
    double cost_var = 25.0;
    bool cost_var_is_stddev = false;
    double slack_lo = 0.1;
    double slack_hi = 1.0;

    double cost_stddev() const;
    void validate() const;

    bool operator==(const WorkloadConfig&) const = default;
};

struct JobStream {
    WorkloadConfig config;
    std::vector<Job> jobs;  // ids 1..n in arrival order

    bool operator==(const JobStream&) const = default;
};

/// Draws a stream. Fully determined by the config (seed included); every
/// generated job satisfies the Job contract. Cost draws at or below zero are
/// redrawn rather than clamped.
JobStream generate_stream(const WorkloadConfig& config);

/// Stream file I/O. The format is a versioned line-based text file, see
/// docs/formats.md. Loading re-validates every job and reports malformed
/// input with line and field context.
std::string stream_to_text(const JobStream& stream);
JobStream stream_from_text(const std::string& text);
void save_stream(const JobStream& stream, const std::filesystem::path& path);
JobStream load_stream(const std::filesystem::path& path);

}  // namespace tiersched
