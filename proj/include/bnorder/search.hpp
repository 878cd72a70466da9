#pragma once

#include <cstdint>
#include <random>
#include <span>

#include "bnorder/dag.hpp"
#include "bnorder/dataset.hpp"
#include "bnorder/family_cache.hpp"
#include "bnorder/features.hpp"
#include "bnorder/score.hpp"

namespace bnorder {

/// Steepest-ascent hill climbing over add/remove/reverse moves (same legality
/// as the structure sampler). Ties go to the smallest (child, parent, kind).
/// With restarts > 1, further climbs start from random legal graphs and the
/// best local optimum is returned.
Dag greedy_hill_climb(const FamilyScorer& scorer, std::span<const NodeSet> candidates, const Dag& seed_graph,
                      int restarts, std::mt19937_64& rng);
Dag greedy_hill_climb(const FamilyCache& cache, const Dag& seed_graph, int restarts, std::mt19937_64& rng);

/// Random DAG whose edges follow a random ordering, candidate sets and the
/// indegree bound.
Dag random_legal_dag(int n, std::span<const NodeSet> candidates, int max_parents, std::mt19937_64& rng);

struct BootstrapConfig {
    int replicates = 100;
    int max_candidates = 20;
    int restarts = 1;
    std::uint64_t seed = 0;
    int jobs = 1;
};

/// Nonparametric bootstrap: each replicate resamples M rows with
/// replacement, learns a structure by greedy search from the empty graph and
/// records its features. Entries are the fraction of replicates with the
/// feature. Replicate b draws from its own stream seeded by (seed, b), so the
/// result does not depend on `jobs`.
FeaturePosteriorTable bootstrap_confidence(const Dataset& data, const ScoreParams& params,
                                           const BootstrapConfig& config, FeatureKind kind);

}  // namespace bnorder
