#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <vector>

#include "bnorder/dag.hpp"
#include "bnorder/family_cache.hpp"
#include "bnorder/features.hpp"
#include "bnorder/order_mcmc.hpp"

namespace bnorder {

/// Enumerator order doubles as the greedy tie-break rank.
enum class MoveKind { add, remove, reverse };

/// add: from -> to is created. remove: from -> to is deleted.
/// reverse: the existing from -> to becomes to -> from.
struct StructureMove {
    MoveKind kind = MoveKind::add;
    int from = 0;
    int to = 0;

    friend bool operator==(const StructureMove&, const StructureMove&) = default;
};

/// Single-edge moves that keep g acyclic, respect the indegree bound and only
/// introduce parents drawn from each child's candidate set. Deletions are
/// always legal. Sorted by (child, parent, kind).
std::vector<StructureMove> legal_moves(const Dag& g, std::span<const NodeSet> candidates, int max_parents);
std::vector<StructureMove> legal_moves(const Dag& g, const FamilyCache& cache);

Dag apply_move(Dag g, const StructureMove& move);

/// Change in Σ log ρ·score caused by `move`, rescoring only the touched families.
double move_delta(const Dag& g, const StructureMove& move, const FamilyScorer& scorer);

struct StructureStep {
    bool accepted = false;
    double delta = 0.0;
};

/// One Metropolis-Hastings step: uniform proposal over legal moves, accepted
/// with min(1, exp(Δ) · |moves(g)| / |moves(g')|). Updates g in place.
StructureStep structure_step(Dag& g, const FamilyCache& cache, std::mt19937_64& rng);

struct StructureMcmcConfig {
    long burn_in = 100'000;
    long thin = 25'000;
    int n_samples = 50;
    std::uint64_t seed = 0;
    /// Starting graph; the empty graph when absent.
    std::optional<Dag> initial;

    void validate() const;
};

struct StructureChainResult {
    std::vector<McmcTraceRecord> trace;
    std::vector<Dag> samples;
};

StructureChainResult run_structure_chain(const FamilyCache& cache, const StructureMcmcConfig& config);

/// Average of the 0/1 feature indicators over sampled graphs.
FeaturePosteriorTable dag_feature_frequencies(std::span<const Dag> samples, const std::vector<std::string>& names,
                                              FeatureKind kind);

}  // namespace bnorder
