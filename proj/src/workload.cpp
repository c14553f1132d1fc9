#include "tiersched/workload.hpp"

#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

#include "tiersched/rng.hpp"

namespace tiersched {

double WorkloadConfig::cost_stddev() const {
    return cost_var_is_stddev ? cost_var : std::sqrt(cost_var);
}

void WorkloadConfig::validate() const {
    if (n_tiers < 1) throw InvariantError("workload: n_tiers must be >= 1");
    if (n_resources < 1) throw InvariantError("workload: n_resources must be >= 1");
    if (n_jobs < 1) throw InvariantError("workload: n_jobs must be >= 1");
    if (exec_lo < 1 || exec_hi < exec_lo)
        throw InvariantError("workload: exec time bounds must satisfy 1 <= lo <= hi");
    if (cost_mean <= 0.0) throw InvariantError("workload: cost_mean must be > 0");
    if (cost_var < 0.0) throw InvariantError("workload: cost_var must be >= 0");
    if (slack_lo <= 0.0 || slack_hi < slack_lo)
        throw InvariantError("workload: slack bounds must satisfy 0 < lo <= hi");
    if (arrival == ArrivalProcess::poisson && arrival_rate <= 0.0)
        throw InvariantError("workload: poisson arrival_rate must be > 0");
}

namespace {

double positive_normal(Rng& rng, double mean, double stddev) {
    for (;;) {
        const double x = rng.normal(mean, stddev);
        if (x > 0.0) return x;
    }
}

}  // namespace

JobStream generate_stream(const WorkloadConfig& config) {
    config.validate();
    Rng rng(config.seed);
    const double stddev = config.cost_stddev();

    JobStream stream;
    stream.config = config;
    stream.jobs.reserve(static_cast<std::size_t>(config.n_jobs));

    TimeUnits clock = 0;
    for (int i = 1; i <= config.n_jobs; ++i) {
        Job job;
        job.id = i;
        if (config.arrival == ArrivalProcess::poisson && i > 1)
            clock += std::max<TimeUnits>(
                0, static_cast<TimeUnits>(std::llround(rng.exponential(1.0 / config.arrival_rate))));
        job.arrivals.assign(static_cast<std::size_t>(config.n_tiers), kUnknownTime);
        job.arrivals.front() = clock;
        job.exec_times.reserve(static_cast<std::size_t>(config.n_tiers));
        for (int j = 0; j < config.n_tiers; ++j)
            job.exec_times.push_back(rng.uniform_int(config.exec_lo, config.exec_hi));
        job.service_cost = positive_normal(rng, config.cost_mean, stddev);
        job.violation_cost = positive_normal(rng, config.cost_mean, stddev);
        const double slack = rng.uniform(config.slack_lo, config.slack_hi);
        const TimeUnits total = job.total_exec();
        const TimeUnits allowance = std::max<TimeUnits>(
            1, static_cast<TimeUnits>(std::llround(static_cast<double>(total) * slack)));
        job.target_completion = clock + total + allowance;
        validate_job(job, config.n_tiers);
        stream.jobs.push_back(std::move(job));
    }
    return stream;
}

namespace {

constexpr const char* kMagic = "tiersched-stream v1";

std::string fmt_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

const char* arrival_name(ArrivalProcess p) {
    return p == ArrivalProcess::batch_at_zero ? "batch" : "poisson";
}

ArrivalProcess arrival_from(const std::string& s, int line) {
    if (s == "batch") return ArrivalProcess::batch_at_zero;
    if (s == "poisson") return ArrivalProcess::poisson;
    throw ParseError(line, "arrival", "expected batch|poisson, got '" + s + "'");
}

std::vector<std::string> split_ws(const std::string& s) {
    std::vector<std::string> out;
    std::istringstream in(s);
    std::string tok;
    while (in >> tok) out.push_back(tok);
    return out;
}

std::int64_t parse_i64(const std::string& tok, int line, const std::string& field) {
    try {
        std::size_t pos = 0;
        const std::int64_t v = std::stoll(tok, &pos);
        if (pos != tok.size()) throw std::invalid_argument(tok);
        return v;
    } catch (const std::exception&) {
        throw ParseError(line, field, "not an integer: '" + tok + "'");
    }
}

double parse_f64(const std::string& tok, int line, const std::string& field) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(tok, &pos);
        if (pos != tok.size()) throw std::invalid_argument(tok);
        return v;
    } catch (const std::exception&) {
        throw ParseError(line, field, "not a number: '" + tok + "'");
    }
}

}  // namespace

std::string stream_to_text(const JobStream& stream) {
    const WorkloadConfig& c = stream.config;
    std::ostringstream out;
    out << kMagic << '\n';
    out << "config"
        << " n_tiers=" << c.n_tiers << " n_resources=" << c.n_resources << " n_jobs=" << c.n_jobs
        << " seed=" << c.seed << " arrival=" << arrival_name(c.arrival)
        << " arrival_rate=" << fmt_double(c.arrival_rate) << " exec_lo=" << c.exec_lo
        << " exec_hi=" << c.exec_hi << " cost_mean=" << fmt_double(c.cost_mean)
        << " cost_var=" << fmt_double(c.cost_var)
        << " cost_var_is_stddev=" << (c.cost_var_is_stddev ? 1 : 0)
        << " slack_lo=" << fmt_double(c.slack_lo) << " slack_hi=" << fmt_double(c.slack_hi)
        << '\n';
    for (const Job& job : stream.jobs) {
        out << "job " << job.id << ' ' << job.arrivals.front() << ' ';
        for (std::size_t j = 0; j < job.exec_times.size(); ++j) {
            if (j > 0) out << ',';
            out << job.exec_times[j];
        }
        out << ' ' << job.deadline() << ' ' << fmt_double(job.service_cost) << ' '
            << fmt_double(job.violation_cost) << '\n';
    }
    return out.str();
}

JobStream stream_from_text(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    int lineno = 0;

    if (!std::getline(in, line)) throw ParseError(1, "header", "empty file");
    ++lineno;
    if (line != kMagic)
        throw ParseError(lineno, "header", "expected '" + std::string(kMagic) + "'");

    if (!std::getline(in, line)) throw ParseError(lineno + 1, "config", "missing config record");
    ++lineno;
    auto toks = split_ws(line);
    if (toks.empty() || toks.front() != "config")
        throw ParseError(lineno, "config", "expected a config record");

    JobStream stream;
    WorkloadConfig& c = stream.config;
    for (std::size_t i = 1; i < toks.size(); ++i) {
        const auto eq = toks[i].find('=');
        if (eq == std::string::npos)
            throw ParseError(lineno, "config", "expected key=value, got '" + toks[i] + "'");
        const std::string key = toks[i].substr(0, eq);
        const std::string val = toks[i].substr(eq + 1);
        if (key == "n_tiers") c.n_tiers = static_cast<int>(parse_i64(val, lineno, key));
        else if (key == "n_resources") c.n_resources = static_cast<int>(parse_i64(val, lineno, key));
        else if (key == "n_jobs") c.n_jobs = static_cast<int>(parse_i64(val, lineno, key));
        else if (key == "seed") c.seed = static_cast<std::uint64_t>(parse_i64(val, lineno, key));
        else if (key == "arrival") c.arrival = arrival_from(val, lineno);
        else if (key == "arrival_rate") c.arrival_rate = parse_f64(val, lineno, key);
        else if (key == "exec_lo") c.exec_lo = parse_i64(val, lineno, key);
        else if (key == "exec_hi") c.exec_hi = parse_i64(val, lineno, key);
        else if (key == "cost_mean") c.cost_mean = parse_f64(val, lineno, key);
        else if (key == "cost_var") c.cost_var = parse_f64(val, lineno, key);
        else if (key == "cost_var_is_stddev") c.cost_var_is_stddev = parse_i64(val, lineno, key) != 0;
        else if (key == "slack_lo") c.slack_lo = parse_f64(val, lineno, key);
        else if (key == "slack_hi") c.slack_hi = parse_f64(val, lineno, key);
        else throw ParseError(lineno, "config", "unknown key '" + key + "'");
    }
    c.validate();

    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        toks = split_ws(line);
        if (toks.front() != "job")
            throw ParseError(lineno, "record", "expected a job record, got '" + toks.front() + "'");
        if (toks.size() != 7)
            throw ParseError(lineno, "record",
                             "expected 7 fields (job id arrival exec deadline psi zeta), got " +
                                 std::to_string(toks.size()));
        Job job;
        job.id = static_cast<JobId>(parse_i64(toks[1], lineno, "id"));
        const TimeUnits arrival = parse_i64(toks[2], lineno, "arrival");
        job.arrivals.assign(static_cast<std::size_t>(c.n_tiers), kUnknownTime);
        job.arrivals.front() = arrival;

        std::istringstream execs(toks[3]);
        std::string item;
        while (std::getline(execs, item, ','))
            job.exec_times.push_back(parse_i64(item, lineno, "exec_times"));
        if (static_cast<int>(job.exec_times.size()) != c.n_tiers)
            throw ParseError(lineno, "exec_times",
                             "expected " + std::to_string(c.n_tiers) + " entries, got " +
                                 std::to_string(job.exec_times.size()));

        const TimeUnits deadline = parse_i64(toks[4], lineno, "deadline");
        job.target_completion = arrival + deadline;
        job.service_cost = parse_f64(toks[5], lineno, "psi");
        job.violation_cost = parse_f64(toks[6], lineno, "zeta");
        validate_job(job, c.n_tiers);
        stream.jobs.push_back(std::move(job));
    }
    if (static_cast<int>(stream.jobs.size()) != c.n_jobs)
        throw ParseError(lineno, "record",
                         "config announces " + std::to_string(c.n_jobs) + " jobs, file has " +
                             std::to_string(stream.jobs.size()));
    for (std::size_t i = 0; i < stream.jobs.size(); ++i)
        if (stream.jobs[i].id != static_cast<JobId>(i + 1))
            throw InvariantError("job ids must be 1..n in arrival order");
    return stream;
}

void save_stream(const JobStream& stream, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InvariantError("cannot open '" + path.string() + "' for writing");
    out << stream_to_text(stream);
    if (!out) throw InvariantError("write failed for '" + path.string() + "'");
}

JobStream load_stream(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InvariantError("cannot open '" + path.string() + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return stream_from_text(buf.str());
}

}  // namespace tiersched
