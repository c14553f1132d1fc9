#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "tiersched/penalty.hpp"
#include "tiersched/rng.hpp"
#include "tiersched/snapshot.hpp"

namespace tiersched {

/// What part of the queue state one chromosome covers. A tier scope cascades
/// every queue of the tier into one virtual queue (jobs may migrate between
/// those queues); the system scope cascades all tiers; a single-queue scope
/// reorders one physical queue and never migrates.
enum class GaScope {
    tier,
    system,
    single_queue,
};

struct ScopeSpec {
    GaScope kind = GaScope::system;
    int tier = 0;   // tier / single_queue
    int queue = 0;  // single_queue only

    bool operator==(const ScopeSpec&) const = default;
};

/// Maps one contiguous gene range back to a physical queue.
struct Segment {
    int tier = 0;
    int queue = 0;
    std::size_t start = 0;
    std::size_t length = 0;

    bool operator==(const Segment&) const = default;
};

/// A virtual queue: a permutation of pending job ids plus the segment map
/// that ties gene positions to physical queues. Segments partition the gene
/// range exactly; genes never leave their tier's block of segments.
struct Chromosome {
    std::vector<JobId> genes;
    std::vector<Segment> segments;
    ScopeSpec scope;

    bool operator==(const Chromosome&) const = default;
};

struct GAConfig {
    int population = 10;
    int generations = 1000;
    double crossover_rate = 0.1;  // applications per generation, as a share of the population
    double mutation_rate = 0.1;
    std::uint64_t seed = 0;

    void validate() const;
};

/// Cascades the scoped queues (tier, then queue order) into a chromosome.
/// Rejects snapshots that leak an in-service job into a pending queue.
Chromosome encode(const Snapshot& snap, const ScopeSpec& scope);

/// Rebuilds a full Schedule: scoped segments impose their new orders, queues
/// outside the scope keep the snapshot's orders. A gene sitting in a segment
/// of another queue has migrated there.
Schedule decode(const Chromosome& chromosome, const Snapshot& snap);

/// Checks the permutation, the segment partition and tier containment.
void validate_chromosome(const Chromosome& chromosome, const Snapshot& snap);

/// Schedule cost of a chromosome, computed positionally without
/// materializing the schedule. For the waiting and end-to-end budget kinds
/// this equals evaluating the decoded schedule; the per-tier budget kind
/// scores each job's holding tier against its own slice only, leaving the
/// overruns already banked in passed tiers to the reporting objective.
double fitness(const Chromosome& chromosome, const Snapshot& snap, FitnessKind kind,
               const PenaltyParams& params);

/// Roulette draw over inverted costs: weight_r = (max_cost - cost_r) + eps,
/// eps = 1e-9 * max(1, max_cost), so the cheapest schedule is the likeliest
/// pick. Degenerates to a uniform draw when every weight vanishes.
std::size_t select_index(std::span<const double> costs, Rng& rng);

/// One-point order crossover: the child copies `a` up to `cut`, then the
/// missing ids in `b`'s relative order. Parents must permute the same ids
/// over identical segments.
Chromosome crossover_single_point(const Chromosome& a, const Chromosome& b, std::size_t cut);

/// Removes the gene at `from` and reinserts it at `to`.
Chromosome mutate_insert(const Chromosome& chromosome, std::size_t from, std::size_t to);

struct EvolveResult {
    Chromosome best;
    double best_cost = 0.0;
    double initial_cost = 0.0;
    std::vector<double> best_trace;  // index 0 is the initial population
    std::vector<double> mean_trace;
};

/// Steady-state evolution: the encoded incumbent plus population-1 random
/// permutations, roulette parents, ceil(rate * population) crossovers and
/// insert mutations per generation, offspring replacing the worst. The
/// incumbent best is never displaced, so the best trace never increases.
EvolveResult evolve(const Snapshot& snap, const ScopeSpec& scope, FitnessKind kind,
                    const GAConfig& config, const PenaltyParams& params);

struct BruteForceResult {
    Chromosome best;
    double cost = 0.0;
    std::uint64_t optima = 0;    // arrangements tying the optimum
    std::uint64_t examined = 0;  // arrangements enumerated
};

/// Exhaustive minimum over every assignment + ordering the scope allows
/// (all tier-preserving permutations against the fixed segment map).
/// Rejects scopes with more than 9 pending jobs.
BruteForceResult brute_force_best(const Snapshot& snap, const ScopeSpec& scope, FitnessKind kind,
                                  const PenaltyParams& params);

}  // namespace tiersched
