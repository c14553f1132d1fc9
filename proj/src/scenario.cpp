#include "tiersched/scenario.hpp"

#include <fstream>
#include <sstream>

#include "json.hpp"

namespace tiersched {

namespace {

using nlohmann::json;

// Fail fast on typos: every object's keys must be known.
void expect_keys(const json& obj, const std::string& where,
                 std::initializer_list<const char*> keys) {
    for (const auto& [key, value] : obj.items()) {
        (void)value;
        bool known = false;
        for (const char* k : keys)
            if (key == k) {
                known = true;
                break;
            }
        if (!known) throw InvariantError("scenario: unknown key '" + key + "' in " + where);
    }
}

template <class T>
void read(const json& obj, const char* key, T& out) {
    if (obj.contains(key)) out = obj.at(key).get<T>();
}

}  // namespace

StrategySpec StrategySpec::parse(const std::string& text) {
    StrategySpec spec;
    spec.text = text;
    std::vector<std::string> parts;
    std::istringstream in(text);
    std::string tok;
    while (std::getline(in, tok, ':')) parts.push_back(tok);
    if (parts.empty()) throw InvariantError("empty strategy spec");

    if (parts[0] != "ga") {
        if (parts.size() != 1)
            throw InvariantError("baseline strategy '" + text + "' takes no arguments");
        spec.kind = Kind::baseline;
        spec.baseline = baseline_from_name(parts[0]);
        return spec;
    }
    if (parts.size() < 3 || parts.size() > 4)
        throw InvariantError("expected ga:<layout>:<fitness>[:diff|:nondiff], got '" + text + "'");
    spec.kind = Kind::ga;
    if (parts[1] == "tier") spec.layout = Layout::tier;
    else if (parts[1] == "system") spec.layout = Layout::system;
    else if (parts[1] == "segmented") spec.layout = Layout::segmented;
    else throw InvariantError("unknown ga layout '" + parts[1] + "'");
    spec.fitness = fitness_kind_from_name(parts[2]);
    if (parts.size() == 4) {
        if (parts[3] == "diff") spec.differentiated = true;
        else if (parts[3] == "nondiff") spec.differentiated = false;
        else throw InvariantError("expected diff|nondiff, got '" + parts[3] + "'");
    }
    return spec;
}

void Scenario::validate() const {
    workload.validate();
    ga.validate();
    penalty.validate();
    if (strategies.empty()) throw InvariantError("scenario: at least one strategy required");
    if (replications < 1) throw InvariantError("scenario: replications must be >= 1");
    if (topology.n_tiers != workload.n_tiers || topology.n_resources != workload.n_resources)
        throw InvariantError("scenario: topology and workload disagree on tiers/resources");
    if (n_jobs_range) {
        const auto [lo, hi] = *n_jobs_range;
        if (lo < 1 || hi < lo) throw InvariantError("scenario: bad n_jobs_range");
    }
    if (backlog_target < 0) throw InvariantError("scenario: backlog_target must be >= 0");
    if (output_format != "csv" && output_format != "jsonl")
        throw InvariantError("scenario: output_format must be csv or jsonl");
}

Scenario Scenario::from_json_text(const std::string& text) {
    json root;
    try {
        root = json::parse(text);
    } catch (const json::exception& err) {
        throw InvariantError(std::string("scenario: ") + err.what());
    }
    expect_keys(root, "scenario",
                {"schema_version", "name", "workload", "topology", "strategies", "ga", "penalty",
                 "epochs", "mode", "snapshot", "replications", "outputs"});

    Scenario s;
    read(root, "schema_version", s.schema_version);
    if (s.schema_version != 1)
        throw InvariantError("scenario: unsupported schema_version " +
                             std::to_string(s.schema_version));
    read(root, "name", s.name);

    if (!root.contains("workload")) throw InvariantError("scenario: missing workload");
    {
        const json& w = root.at("workload");
        expect_keys(w, "workload",
                    {"n_tiers", "n_resources", "n_jobs", "n_jobs_range", "seed", "arrival",
                     "arrival_rate", "exec_time", "cost_mean", "cost_var", "cost_var_is_stddev",
                     "allowance_slack"});
        read(w, "n_tiers", s.workload.n_tiers);
        read(w, "n_resources", s.workload.n_resources);
        read(w, "n_jobs", s.workload.n_jobs);
        read(w, "seed", s.workload.seed);
        if (w.contains("arrival")) {
            const std::string a = w.at("arrival").get<std::string>();
            if (a == "batch") s.workload.arrival = ArrivalProcess::batch_at_zero;
            else if (a == "poisson") s.workload.arrival = ArrivalProcess::poisson;
            else throw InvariantError("scenario: arrival must be batch or poisson");
        }
        read(w, "arrival_rate", s.workload.arrival_rate);
        if (w.contains("exec_time")) {
            const auto bounds = w.at("exec_time").get<std::vector<TimeUnits>>();
            if (bounds.size() != 2) throw InvariantError("scenario: exec_time wants [lo, hi]");
            s.workload.exec_lo = bounds[0];
            s.workload.exec_hi = bounds[1];
        }
        read(w, "cost_mean", s.workload.cost_mean);
        read(w, "cost_var", s.workload.cost_var);
        read(w, "cost_var_is_stddev", s.workload.cost_var_is_stddev);
        if (w.contains("allowance_slack")) {
            const auto bounds = w.at("allowance_slack").get<std::vector<double>>();
            if (bounds.size() != 2) throw InvariantError("scenario: allowance_slack wants [lo, hi]");
            s.workload.slack_lo = bounds[0];
            s.workload.slack_hi = bounds[1];
        }
        if (w.contains("n_jobs_range")) {
            const auto bounds = w.at("n_jobs_range").get<std::vector<int>>();
            if (bounds.size() != 2) throw InvariantError("scenario: n_jobs_range wants [lo, hi]");
            s.n_jobs_range = {bounds[0], bounds[1]};
        }
    }

    s.topology.n_tiers = s.workload.n_tiers;
    s.topology.n_resources = s.workload.n_resources;
    if (root.contains("topology")) {
        const json& t = root.at("topology");
        expect_keys(t, "topology", {"n_tiers", "n_resources"});
        read(t, "n_tiers", s.topology.n_tiers);
        read(t, "n_resources", s.topology.n_resources);
    }

    if (!root.contains("strategies")) throw InvariantError("scenario: missing strategies");
    for (const auto& item : root.at("strategies"))
        s.strategies.push_back(StrategySpec::parse(item.get<std::string>()));

    if (root.contains("ga")) {
        const json& g = root.at("ga");
        expect_keys(g, "ga",
                    {"population", "generations", "crossover_rate", "mutation_rate", "seed"});
        read(g, "population", s.ga.population);
        read(g, "generations", s.ga.generations);
        read(g, "crossover_rate", s.ga.crossover_rate);
        read(g, "mutation_rate", s.ga.mutation_rate);
        read(g, "seed", s.ga.seed);
    }

    if (root.contains("penalty")) {
        const json& p = root.at("penalty");
        expect_keys(p, "penalty",
                    {"chi", "nu", "differentiated", "clamp_satisfied", "count_in_service"});
        read(p, "chi", s.penalty.chi);
        read(p, "nu", s.penalty.nu);
        read(p, "differentiated", s.penalty.differentiated);
        read(p, "clamp_satisfied", s.penalty.clamp_satisfied);
        if (p.contains("count_in_service"))
            s.penalty.residual = p.at("count_in_service").get<bool>()
                                     ? ResidualPolicy::count_in_service
                                     : ResidualPolicy::ignore_in_service;
    }

    if (root.contains("epochs")) {
        const json& e = root.at("epochs");
        expect_keys(e, "epochs", {"on_batch_arrival", "period"});
        read(e, "on_batch_arrival", s.epochs.on_batch_arrival);
        read(e, "period", s.epochs.period);
    }

    if (root.contains("mode")) {
        const std::string m = root.at("mode").get<std::string>();
        if (m == "stream") s.mode = Mode::stream;
        else if (m == "snapshot") s.mode = Mode::snapshot;
        else throw InvariantError("scenario: mode must be stream or snapshot");
    }
    if (root.contains("snapshot")) {
        const json& sn = root.at("snapshot");
        expect_keys(sn, "snapshot", {"backlog_target"});
        read(sn, "backlog_target", s.backlog_target);
    }
    read(root, "replications", s.replications);

    if (root.contains("outputs")) {
        const json& o = root.at("outputs");
        expect_keys(o, "outputs", {"dir", "format"});
        read(o, "dir", s.output_dir);
        read(o, "format", s.output_format);
    }

    s.validate();
    return s;
}

Scenario Scenario::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw InvariantError("cannot open '" + path.string() + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return from_json_text(buf.str());
}

}  // namespace tiersched
