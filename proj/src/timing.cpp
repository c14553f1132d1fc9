#include "tiersched/timing.hpp"

#include <numeric>

namespace tiersched {

TimeUnits Job::total_exec() const {
    return std::accumulate(exec_times.begin(), exec_times.end(), TimeUnits{0});
}

TimeUnits Job::deadline() const {
    return target_completion - (arrivals.empty() ? 0 : arrivals.front());
}

TimeUnits Job::allowance() const {
    return deadline() - total_exec();
}

void validate_job(const Job& job, int n_tiers) {
    const std::string tag = "job " + std::to_string(job.id) + ": ";
    if (job.id <= 0) throw InvariantError(tag + "id must be positive");
    if (static_cast<int>(job.exec_times.size()) != n_tiers)
        throw InvariantError(tag + "expected " + std::to_string(n_tiers) + " exec_times, got " +
                             std::to_string(job.exec_times.size()));
    for (int j = 0; j < n_tiers; ++j)
        if (job.exec_times[j] <= 0)
            throw InvariantError(tag + "exec_times[" + std::to_string(j) + "] must be > 0");
    if (job.arrivals.empty() || job.arrivals.front() == kUnknownTime)
        throw InvariantError(tag + "first arrival is not set");
    if (job.allowance() <= 0)
        throw InvariantError(tag + "deadline " + std::to_string(job.deadline()) +
                             " leaves no waiting allowance over total exec " +
                             std::to_string(job.total_exec()));
    if (job.service_cost <= 0.0) throw InvariantError(tag + "service_cost must be > 0");
    if (job.violation_cost <= 0.0) throw InvariantError(tag + "violation_cost must be > 0");
}

Allowances compute_allowances(const Job& job) {
    Allowances a;
    a.deadline = job.deadline();
    a.multitier = job.allowance();
    a.per_tier.reserve(job.exec_times.size());
    const double total = static_cast<double>(job.total_exec());
    for (TimeUnits e : job.exec_times)
        a.per_tier.push_back(static_cast<double>(a.multitier) * static_cast<double>(e) / total);
    return a;
}

double tier_allowance(const Job& job, int tier) {
    const TimeUnits total = job.total_exec();
    if (total <= 0)
        throw InvariantError("job " + std::to_string(job.id) + ": zero total execution time");
    if (tier < 0 || tier >= static_cast<int>(job.exec_times.size()))
        throw InvariantError("job " + std::to_string(job.id) + ": no tier " + std::to_string(tier));
    return static_cast<double>(job.allowance()) * static_cast<double>(job.exec_times[tier]) /
           static_cast<double>(total);
}

JobTiming& TimingTrace::at(JobId id) {
    if (id <= 0 || static_cast<std::size_t>(id) > jobs.size()) throw UnknownJobError(id);
    return jobs[static_cast<std::size_t>(id) - 1];
}

const JobTiming& TimingTrace::at(JobId id) const {
    return const_cast<TimingTrace*>(this)->at(id);
}

std::optional<TimeUnits> response_time(const TimingTrace& trace, const Job& job) {
    const JobTiming& t = trace.at(job.id);
    if (t.departures.empty() || t.departures.back() == kUnknownTime) return std::nullopt;
    return t.departures.back() - job.arrivals.front();
}

std::vector<TimeUnits> queue_waiting_times(std::span<const JobId> order,
                                           const std::unordered_map<JobId, TimeUnits>& exec_times,
                                           TimeUnits in_service_residual, ResidualPolicy policy) {
    std::vector<TimeUnits> waits;
    waits.reserve(order.size());
    TimeUnits ahead = policy == ResidualPolicy::count_in_service ? in_service_residual : 0;
    for (JobId id : order) {
        auto it = exec_times.find(id);
        if (it == exec_times.end()) throw UnknownJobError(id);
        waits.push_back(ahead);
        ahead += it->second;
    }
    return waits;
}

double expected_multitier_wait(TimeUnits waited_prior, TimeUnits elapsed, TimeUnits remaining) {
    return static_cast<double>(waited_prior + elapsed + remaining);
}

double expected_tier_wait(TimeUnits elapsed, TimeUnits remaining) {
    return static_cast<double>(elapsed + remaining);
}

}  // namespace tiersched
