#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace tiersched {

/// All clocks, waits and deadlines are integral time units so that the
/// conservation identities hold exactly and replays are bit-reproducible.
using TimeUnits = std::int64_t;
using JobId = std::int32_t;

/// Sentinel for per-tier arrival/departure stamps the job has not reached yet.
inline constexpr TimeUnits kUnknownTime = -1;

/// Raised when an input violates a documented contract: bad configuration,
/// malformed file, or a schedule that drops/duplicates pending jobs.
class InvariantError : public std::runtime_error {
  public:
    explicit InvariantError(const std::string& what) : std::runtime_error(what) {}
};

class UnknownJobError : public InvariantError {
  public:
    explicit UnknownJobError(JobId id)
        : InvariantError("unknown job id " + std::to_string(id)), id_(id) {}
    JobId id() const noexcept { return id_; }

  private:
    JobId id_;
};

/// Malformed persisted input, pinned to a line and field.
class ParseError : public InvariantError {
  public:
    ParseError(int line, const std::string& field, const std::string& what)
        : InvariantError("line " + std::to_string(line) + ", " + field + ": " + what),
          line_(line),
          field_(field) {}
    int line() const noexcept { return line_; }
    const std::string& field() const noexcept { return field_; }

  private:
    int line_;
    std::string field_;
};

/// A client job. The id doubles as the arrival-order index (1-based).
/// `service_cost` weighs a unit of waiting, `violation_cost` a unit of
/// deadline overrun; both are per-time-unit cost coefficients.
struct Job {
    JobId id = 0;
    std::vector<TimeUnits> arrivals;    // per tier; kUnknownTime until the job gets there
    std::vector<TimeUnits> exec_times;  // per tier, each > 0
    TimeUnits target_completion = 0;    // absolute completion obligation
    double service_cost = 1.0;
    double violation_cost = 1.0;

    TimeUnits total_exec() const;
    TimeUnits deadline() const;   // target_completion - first arrival
    TimeUnits allowance() const;  // deadline - total_exec, > 0 by contract

    bool operator==(const Job&) const = default;
};

/// Checks the Job contract: one positive demand per tier, positive costs,
/// and a deadline that leaves a strictly positive waiting allowance.
void validate_job(const Job& job, int n_tiers);

/// Waiting budgets of one job: the end-to-end allowance and its split
/// across tiers proportional to each tier's share of the execution time.
struct Allowances {
    TimeUnits deadline = 0;
    TimeUnits multitier = 0;
    std::vector<double> per_tier;
};

Allowances compute_allowances(const Job& job);

/// One tier's slice of the allowance. Throws InvariantError when the job
/// has no execution demand (a job invariant violation).
double tier_allowance(const Job& job, int tier);

/// Execution orderings of the pending jobs in one tier, queue by queue.
/// The queue front executes next.
struct TierOrdering {
    std::vector<std::vector<JobId>> queues;

    bool operator==(const TierOrdering&) const = default;
};

/// A full assignment + ordering of pending jobs across every tier.
/// Jobs never move between tiers; within a tier they may change queues.
struct Schedule {
    std::vector<TierOrdering> tiers;

    bool operator==(const Schedule&) const = default;
};

/// Realized and estimated timing components of one job.
/// `waited`/`departures` are filled tier by tier as the job progresses;
/// the estimate fields hold the last evaluated decision-epoch values.
struct JobTiming {
    JobId id = 0;
    std::vector<TimeUnits> waited;
    std::vector<TimeUnits> departures;
    std::vector<int> served_by;  // queue index per tier, -1 until served
    TimeUnits total_wait = 0;
    std::optional<TimeUnits> response;

    TimeUnits elapsed = 0;    // waiting so far in the holding tier
    TimeUnits remaining = 0;  // queue wait still ahead in the holding tier
    double expected_multitier = 0.0;
    double expected_tier = 0.0;

    bool operator==(const JobTiming&) const = default;
};

struct TimingTrace {
    std::vector<JobTiming> jobs;  // indexed by id - 1

    JobTiming& at(JobId id);
    const JobTiming& at(JobId id) const;

    bool operator==(const TimingTrace&) const = default;
};

/// End-to-end response time D_{last} - A_{first}; empty until the job has
/// left the last tier.
std::optional<TimeUnits> response_time(const TimingTrace& trace, const Job& job);

}  // namespace tiersched
