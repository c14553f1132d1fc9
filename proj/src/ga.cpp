#include "tiersched/ga.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <unordered_set>

namespace tiersched {

void GAConfig::validate() const {
    if (population < 2) throw InvariantError("ga: population must be >= 2");
    if (generations < 0) throw InvariantError("ga: generations must be >= 0");
    if (crossover_rate < 0.0 || mutation_rate < 0.0)
        throw InvariantError("ga: operator rates must be >= 0");
}

namespace {

bool scope_covers(const ScopeSpec& scope, int tier, int queue) {
    switch (scope.kind) {
        case GaScope::system: return true;
        case GaScope::tier: return tier == scope.tier;
        case GaScope::single_queue: return tier == scope.tier && queue == scope.queue;
    }
    return false;
}

// Contiguous gene ranges per tier; operators keep genes inside their block.
std::vector<std::pair<std::size_t, std::size_t>> tier_blocks(const Chromosome& c) {
    std::vector<std::pair<std::size_t, std::size_t>> blocks;
    int open_tier = -1;
    for (const Segment& s : c.segments) {
        if (blocks.empty() || s.tier != open_tier) {
            blocks.emplace_back(s.start, s.start + s.length);
            open_tier = s.tier;
        } else {
            blocks.back().second = s.start + s.length;
        }
    }
    std::erase_if(blocks, [](const auto& b) { return b.second <= b.first; });
    return blocks;
}

}  // namespace

Chromosome encode(const Snapshot& snap, const ScopeSpec& scope) {
    if (scope.kind != GaScope::system &&
        (scope.tier < 0 || scope.tier >= snap.n_tiers))
        throw InvariantError("scope tier " + std::to_string(scope.tier) + " out of range");
    if (scope.kind == GaScope::single_queue &&
        (scope.queue < 0 || scope.queue >= snap.n_queues_per_tier))
        throw InvariantError("scope queue " + std::to_string(scope.queue) + " out of range");
    Chromosome c;
    c.scope = scope;
    for (const SnapshotQueue& q : snap.queues) {
        if (!scope_covers(scope, q.tier, q.queue) || q.pending.empty()) continue;
        Segment seg{q.tier, q.queue, c.genes.size(), q.pending.size()};
        for (JobId id : q.pending) {
            if (q.in_service && *q.in_service == id)
                throw InvariantError("job " + std::to_string(id) +
                                     " is in service and cannot be encoded");
            c.genes.push_back(id);
        }
        c.segments.push_back(seg);
    }
    return c;
}

void validate_chromosome(const Chromosome& c, const Snapshot& snap) {
    std::size_t covered = 0;
    std::vector<JobId> scheduled;
    scheduled.reserve(c.genes.size());
    for (const Segment& s : c.segments) {
        if (s.start != covered)
            throw InvariantError("segments do not partition the gene range at offset " +
                                 std::to_string(s.start));
        covered += s.length;
        for (std::size_t i = s.start; i < s.start + s.length; ++i) {
            const JobId id = c.genes[i];
            if (snap.at(id).tier != s.tier)
                throw InvariantError("job " + std::to_string(id) + " of tier " +
                                     std::to_string(snap.at(id).tier) +
                                     " placed in a segment of tier " + std::to_string(s.tier));
            scheduled.push_back(id);
        }
    }
    if (covered != c.genes.size())
        throw InvariantError("segments cover " + std::to_string(covered) + " genes of " +
                             std::to_string(c.genes.size()));

    std::vector<JobId> pending;
    for (const SnapshotQueue& q : snap.queues)
        if (scope_covers(c.scope, q.tier, q.queue))
            pending.insert(pending.end(), q.pending.begin(), q.pending.end());
    std::sort(pending.begin(), pending.end());
    std::vector<JobId> sorted = scheduled;
    std::sort(sorted.begin(), sorted.end());
    if (sorted != pending)
        throw InvariantError("genes are not a permutation of the scoped pending jobs");
}

Schedule decode(const Chromosome& c, const Snapshot& snap) {
    validate_chromosome(c, snap);
    Schedule schedule = snapshot_schedule(snap);
    for (const Segment& s : c.segments) {
        auto& queue = schedule.tiers[static_cast<std::size_t>(s.tier)]
                          .queues[static_cast<std::size_t>(s.queue)];
        queue.assign(c.genes.begin() + static_cast<std::ptrdiff_t>(s.start),
                     c.genes.begin() + static_cast<std::ptrdiff_t>(s.start + s.length));
    }
    return schedule;
}

namespace {

// Fitness contribution of one job. Differs from the reporting objective for
// the per-tier budget kind: the fitness scores the holding tier against its
// own slice only, while the objective also carries overruns banked in the
// tiers already passed.
double job_fitness_cost(const SnapshotJob& job, TimeUnits remaining, FitnessKind kind,
                        const PenaltyParams& params) {
    if (kind == FitnessKind::sla_tier_allowance) {
        const double w = params.differentiated ? job.violation_cost : 1.0;
        double alpha = expected_tier_wait(job.elapsed, remaining) - job.tier_allow_here;
        if (params.clamp_satisfied) alpha = std::max(alpha, 0.0);
        return w * alpha;
    }
    return job_epoch_cost(job, remaining, kind, params);
}

// Positional cost of the scoped segments only.
double segment_cost(std::span<const JobId> genes, const std::vector<Segment>& segments,
                    const Snapshot& snap, FitnessKind kind, const PenaltyParams& params) {
    double total = 0.0;
    for (const Segment& s : segments) {
        const SnapshotQueue& q = snap.queue(s.tier, s.queue);
        TimeUnits ahead = params.residual == ResidualPolicy::count_in_service ? q.residual : 0;
        for (std::size_t i = s.start; i < s.start + s.length; ++i) {
            const SnapshotJob& job = snap.at(genes[i]);
            total += job_fitness_cost(job, ahead, kind, params);
            ahead += job.exec_here;
        }
    }
    return total;
}

// Cost of the queues the scope leaves untouched (schedule-invariant).
double unscoped_cost(const Snapshot& snap, const ScopeSpec& scope, FitnessKind kind,
                     const PenaltyParams& params) {
    double total = 0.0;
    for (const SnapshotQueue& q : snap.queues) {
        if (scope_covers(scope, q.tier, q.queue)) continue;
        TimeUnits ahead = params.residual == ResidualPolicy::count_in_service ? q.residual : 0;
        for (JobId id : q.pending) {
            const SnapshotJob& job = snap.at(id);
            total += job_fitness_cost(job, ahead, kind, params);
            ahead += job.exec_here;
        }
    }
    return total;
}

}  // namespace

double fitness(const Chromosome& c, const Snapshot& snap, FitnessKind kind,
               const PenaltyParams& params) {
    validate_chromosome(c, snap);
    return segment_cost(c.genes, c.segments, snap, kind, params) +
           unscoped_cost(snap, c.scope, kind, params);
}

std::size_t select_index(std::span<const double> costs, Rng& rng) {
    if (costs.empty()) throw InvariantError("selection over an empty population");
    if (costs.size() == 1) return 0;
    double max_cost = costs[0];
    for (double f : costs) {
        if (!std::isfinite(f)) throw InvariantError("selection requires finite costs");
        max_cost = std::max(max_cost, f);
    }
    const double eps = 1e-9 * std::max(1.0, max_cost);
    double total = 0.0;
    for (double f : costs) total += (max_cost - f) + eps;
    if (total <= 0.0)
        return static_cast<std::size_t>(
            rng.uniform_int(0, static_cast<std::int64_t>(costs.size()) - 1));
    const double target = rng.uniform01() * total;
    double cumulative = 0.0;
    for (std::size_t i = 0; i < costs.size(); ++i) {
        cumulative += (max_cost - costs[i]) + eps;
        if (cumulative >= target) return i;
    }
    return costs.size() - 1;
}

Chromosome crossover_single_point(const Chromosome& a, const Chromosome& b, std::size_t cut) {
    if (a.segments != b.segments)
        throw InvariantError("crossover parents carry different segment maps");
    if (cut > a.genes.size())
        throw InvariantError("crossover cut " + std::to_string(cut) + " out of range");
    {
        std::vector<JobId> ia = a.genes, ib = b.genes;
        std::sort(ia.begin(), ia.end());
        std::sort(ib.begin(), ib.end());
        if (ia != ib) throw InvariantError("crossover parents permute different job sets");
    }
    Chromosome child = a;
    std::unordered_set<JobId> taken(a.genes.begin(), a.genes.begin() + static_cast<std::ptrdiff_t>(cut));
    std::size_t fill = cut;
    for (JobId id : b.genes) {
        if (taken.count(id)) continue;
        child.genes[fill++] = id;
    }
    return child;
}

Chromosome mutate_insert(const Chromosome& c, std::size_t from, std::size_t to) {
    if (from >= c.genes.size() || to >= c.genes.size())
        throw InvariantError("insert positions out of range");
    Chromosome out = c;
    const JobId gene = out.genes[from];
    out.genes.erase(out.genes.begin() + static_cast<std::ptrdiff_t>(from));
    out.genes.insert(out.genes.begin() + static_cast<std::ptrdiff_t>(to), gene);
    return out;
}

namespace {

int rounds(double rate, int population) {
    return std::max(1, static_cast<int>(std::ceil(rate * population)));
}

std::pair<std::size_t, std::size_t> block_of(
    const std::vector<std::pair<std::size_t, std::size_t>>& blocks, std::size_t pos) {
    for (const auto& b : blocks)
        if (pos >= b.first && pos < b.second) return b;
    throw InvariantError("gene position " + std::to_string(pos) + " outside every tier block");
}

}  // namespace

EvolveResult evolve(const Snapshot& snap, const ScopeSpec& scope, FitnessKind kind,
                    const GAConfig& config, const PenaltyParams& params) {
    config.validate();
    const Chromosome incumbent = encode(snap, scope);
    const double fixed = unscoped_cost(snap, scope, kind, params);
    auto cost_of = [&](const Chromosome& c) {
        return segment_cost(c.genes, c.segments, snap, kind, params) + fixed;
    };

    EvolveResult result;
    result.best = incumbent;
    result.best_cost = cost_of(incumbent);
    result.initial_cost = result.best_cost;
    if (incumbent.genes.size() <= 1) {
        result.best_trace.assign(static_cast<std::size_t>(config.generations) + 1,
                                 result.best_cost);
        result.mean_trace = result.best_trace;
        return result;
    }

    Rng rng(config.seed);
    const auto blocks = tier_blocks(incumbent);
    const int n = config.population;

    std::vector<Chromosome> population;
    std::vector<double> costs;
    population.reserve(static_cast<std::size_t>(n));
    population.push_back(incumbent);
    for (int i = 1; i < n; ++i) {
        Chromosome c = incumbent;
        for (const auto& b : blocks)
            for (std::size_t k = b.second - b.first; k > 1; --k) {
                const auto j = static_cast<std::size_t>(
                    rng.uniform_int(0, static_cast<std::int64_t>(k) - 1));
                std::swap(c.genes[b.first + k - 1], c.genes[b.first + j]);
            }
        population.push_back(std::move(c));
    }
    costs.reserve(population.size());
    for (const Chromosome& c : population) costs.push_back(cost_of(c));

    std::size_t best_idx = 0;
    for (std::size_t i = 1; i < costs.size(); ++i)
        if (costs[i] < costs[best_idx]) best_idx = i;
    result.best = population[best_idx];
    result.best_cost = costs[best_idx];

    auto mean = [&costs] {
        return std::accumulate(costs.begin(), costs.end(), 0.0) /
               static_cast<double>(costs.size());
    };
    result.best_trace.push_back(result.best_cost);
    result.mean_trace.push_back(mean());

    const int n_cross = rounds(config.crossover_rate, n);
    const int n_mut = rounds(config.mutation_rate, n);
    const std::size_t length = incumbent.genes.size();

    // A mutation application is either one insert (half of them short hops,
    // half anywhere in the tier block) or an exchange of two block-mates,
    // written as two chained inserts. Plain inserts cannot swap a pair of
    // jobs across queues without passing through a worse intermediate, and
    // that trap measurably caps the search on small enumerable instances.
    auto random_move = [&](Chromosome c) {
        const auto from =
            static_cast<std::size_t>(rng.uniform_int(0, static_cast<std::int64_t>(length) - 1));
        const auto block = block_of(blocks, from);
        if (rng.uniform01() < 0.6) {
            const auto with = static_cast<std::size_t>(
                rng.uniform_int(static_cast<std::int64_t>(block.first),
                                static_cast<std::int64_t>(block.second) - 1));
            if (with == from) return c;
            const auto lo = std::min(from, with);
            const auto hi = std::max(from, with);
            return mutate_insert(mutate_insert(c, hi, lo), lo + 1, hi);
        }
        std::size_t to;
        if (rng.uniform01() < 0.5) {
            const auto hop = rng.uniform_int(1, 3);
            const auto raw = static_cast<std::int64_t>(from) +
                             (rng.uniform01() < 0.5 ? -hop : hop);
            to = static_cast<std::size_t>(
                std::clamp(raw, static_cast<std::int64_t>(block.first),
                           static_cast<std::int64_t>(block.second) - 1));
        } else {
            to = static_cast<std::size_t>(
                rng.uniform_int(static_cast<std::int64_t>(block.first),
                                static_cast<std::int64_t>(block.second) - 1));
        }
        return mutate_insert(c, from, to);
    };
    // Clone offspring teach the search nothing; perturb them until they are
    // new orders, so every generation truly constructs fresh candidates.
    auto make_novel = [&](Chromosome c, const std::vector<Chromosome>& batch) {
        for (int guard = 0; guard < 64; ++guard) {
            const bool dup =
                std::any_of(population.begin(), population.end(),
                            [&](const Chromosome& p) { return p.genes == c.genes; }) ||
                std::any_of(batch.begin(), batch.end(),
                            [&](const Chromosome& p) { return p.genes == c.genes; });
            if (!dup) break;
            c = random_move(std::move(c));
        }
        return c;
    };

    // When no single move improves for a while, reseed everything but the
    // elite and explore another basin.
    const int stagnation_limit = 40;
    int stagnant = 0;
    auto reseed_around_best = [&] {
        std::size_t keep = 0;
        for (std::size_t i = 1; i < costs.size(); ++i)
            if (costs[i] < costs[keep]) keep = i;
        for (std::size_t i = 0; i < population.size(); ++i) {
            if (i == keep) continue;
            Chromosome c = population[keep];
            for (const auto& b : blocks)
                for (std::size_t k = b.second - b.first; k > 1; --k) {
                    const auto j = static_cast<std::size_t>(
                        rng.uniform_int(0, static_cast<std::int64_t>(k) - 1));
                    std::swap(c.genes[b.first + k - 1], c.genes[b.first + j]);
                }
            population[i] = std::move(c);
            costs[i] = cost_of(population[i]);
        }
    };

    std::vector<Chromosome> offspring;
    std::vector<double> offspring_cost;
    for (int g = 0; g < config.generations; ++g) {
        if (stagnant >= stagnation_limit) {
            reseed_around_best();
            stagnant = 0;
        }
        offspring.clear();
        offspring_cost.clear();
        for (int k = 0; k < n_cross; ++k) {
            const std::size_t pa = select_index(costs, rng);
            const std::size_t pb = select_index(costs, rng);
            const auto cut =
                static_cast<std::size_t>(rng.uniform_int(0, static_cast<std::int64_t>(length)));
            // both complementary children of the pair
            offspring.push_back(make_novel(
                crossover_single_point(population[pa], population[pb], cut), offspring));
            offspring.push_back(make_novel(
                crossover_single_point(population[pb], population[pa], cut), offspring));
        }
        for (int k = 0; k < n_mut; ++k) {
            const std::size_t p = select_index(costs, rng);
            offspring.push_back(make_novel(random_move(population[p]), offspring));
        }
        for (const Chromosome& c : offspring) offspring_cost.push_back(cost_of(c));

        // steady state: offspring displace the worst, the best always stays
        std::vector<std::size_t> order(population.size());
        std::iota(order.begin(), order.end(), 0);
        std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            if (costs[a] != costs[b]) return costs[a] > costs[b];
            return a < b;
        });
        const std::size_t replace =
            std::min(offspring.size(), population.size() - 1);
        bool improved = false;
        for (std::size_t k = 0; k < replace; ++k) {
            const std::size_t victim = order[k];
            population[victim] = std::move(offspring[k]);
            costs[victim] = offspring_cost[k];
            if (costs[victim] < result.best_cost) {
                result.best_cost = costs[victim];
                result.best = population[victim];
                improved = true;
            }
        }
        stagnant = improved ? 0 : stagnant + 1;
        result.best_trace.push_back(result.best_cost);
        result.mean_trace.push_back(mean());
    }
    return result;
}

BruteForceResult brute_force_best(const Snapshot& snap, const ScopeSpec& scope, FitnessKind kind,
                                  const PenaltyParams& params) {
    const Chromosome incumbent = encode(snap, scope);
    if (incumbent.genes.size() > 9)
        throw InvariantError("brute force limited to 9 jobs, scope has " +
                             std::to_string(incumbent.genes.size()));
    const double fixed = unscoped_cost(snap, scope, kind, params);

    BruteForceResult result;
    result.best = incumbent;
    result.cost = segment_cost(incumbent.genes, incumbent.segments, snap, kind, params) + fixed;
    result.optima = 0;
    result.examined = 0;

    Chromosome candidate = incumbent;
    const auto blocks = tier_blocks(incumbent);
    for (const auto& b : blocks)
        std::sort(candidate.genes.begin() + static_cast<std::ptrdiff_t>(b.first),
                  candidate.genes.begin() + static_cast<std::ptrdiff_t>(b.second));

    const double tol = 1e-9;
    auto visit = [&](const Chromosome& c) {
        const double cost = segment_cost(c.genes, c.segments, snap, kind, params) + fixed;
        ++result.examined;
        const double slack = tol * std::max(1.0, std::abs(result.cost));
        if (cost < result.cost - slack) {
            result.cost = cost;
            result.best = c;
            result.optima = 1;
        } else if (std::abs(cost - result.cost) <= slack) {
            ++result.optima;
        }
    };

    // nested lexicographic enumeration, one permutation cycle per tier block
    std::function<void(std::size_t)> enumerate = [&](std::size_t block) {
        if (block == blocks.size()) {
            visit(candidate);
            return;
        }
        const auto [lo, hi] = blocks[block];
        auto first = candidate.genes.begin() + static_cast<std::ptrdiff_t>(lo);
        auto last = candidate.genes.begin() + static_cast<std::ptrdiff_t>(hi);
        do {
            enumerate(block + 1);
        } while (std::next_permutation(first, last));
        std::sort(first, last);
    };
    if (blocks.empty()) {
        visit(candidate);
    } else {
        result.cost = segment_cost(candidate.genes, candidate.segments, snap, kind, params) + fixed;
        result.best = candidate;
        enumerate(0);
    }
    return result;
}

}  // namespace tiersched
