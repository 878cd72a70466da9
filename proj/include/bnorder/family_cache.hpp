#pragma once

#include <cstdint>
#include <iosfwd>
#include <limits>
#include <memory>
#include <span>
#include <vector>

#include "bnorder/node_set.hpp"
#include "bnorder/score.hpp"

namespace bnorder {

/// A candidate parent set with log ρ + log score (natural log).
struct ScoredFamily {
    NodeSet parents;
    double log_weight = 0.0;
};

/// Knobs for the candidate-parent / family-cache approximation.
struct CacheOptions {
    /// m_P: candidate parents per node.
    int max_candidates = 20;
    /// m_F: cached families per node.
    std::size_t max_families = 4000;
    /// γ in bits. Used both as the pruning margin and as the fallback
    /// threshold above the cache floor. Infinity disables pruning and forces
    /// exact enumeration whenever a node's cache is truncated.
    double gamma_bits = 10.0;
    /// false switches off Δ-pruning everywhere (exactness checks).
    bool prune = true;

    double gamma_nats() const;

    /// k = 3 (set on ScoreParams), m_P = 20, m_F = 4000, γ = 10 bits.
    static CacheOptions defaults() { return {}; }
    /// Every family over every other node, no pruning.
    static CacheOptions exhaustive(int num_vars) {
        return {num_vars, std::numeric_limits<std::size_t>::max(), std::numeric_limits<double>::infinity(), false};
    }
};

/// For every node, the `max_candidates` other nodes with the best single-parent
/// score (ties: smaller id first). All other nodes when n − 1 <= max_candidates.
std::vector<NodeSet> select_candidates(const FamilyScorer& scorer, int max_candidates);

/// Enumerates families U ⊆ `allowed` with |U| <= k for `node`.
///
/// Order: ∅, then families by size, lexicographic within a size. With
/// pruning on, a nonempty U is not extended when, for every Y ∈ allowed \ U,
///   log_weight(U) + Δ(Y) < best − margin_nats,
/// where best covers all families up to |U|. A larger family is still
/// enumerated when some other subset one smaller was extended.
/// `deltas` is indexed by node id and must be filled for every member of `allowed`.
std::vector<ScoredFamily> enumerate_families_pruned(const FamilyScorer& scorer, int node, NodeSet allowed,
                                                    std::span<const double> deltas, bool prune,
                                                    double margin_nats);

/// Per-node top-m_F family lists over candidate parents.
///
/// Immutable after build; any number of threads may read it.
class FamilyCache {
public:
    struct Node {
        NodeSet candidates;
        /// Descending by log_weight; ties broken by lexicographically smaller family.
        std::vector<ScoredFamily> families;
        /// Weight of the worst cached family (ℓ_i).
        double floor = 0.0;
        /// The empty family's weight, always retained even when it misses the cut.
        double empty_log_weight = 0.0;
        /// True when nothing the enumeration produced was evicted.
        bool complete = true;
        /// Δ(Y; X_i) indexed by Y; NaN outside the candidates.
        std::vector<double> deltas;
        /// containing[Y] = ascending indices of cached families with Y as a member.
        std::vector<std::vector<std::uint32_t>> containing;
    };

    /// Builds the cache; node computations run on up to `jobs` threads.
    static FamilyCache build(std::shared_ptr<const FamilyScorer> scorer, const CacheOptions& options, int jobs = 1);

    const FamilyScorer& scorer() const { return *scorer_; }
    std::shared_ptr<const FamilyScorer> shared_scorer() const { return scorer_; }
    const CacheOptions& options() const { return options_; }
    int num_vars() const { return scorer_->num_vars(); }
    int max_parents() const { return scorer_->max_parents(); }

    const Node& node(int i) const { return nodes_[static_cast<std::size_t>(i)]; }
    NodeSet candidates(int i) const { return node(i).candidates; }
    std::span<const ScoredFamily> families(int i) const { return node(i).families; }
    double floor(int i) const { return node(i).floor; }
    double delta(int child, int parent) const { return node(child).deltas[static_cast<std::size_t>(parent)]; }

    /// node<TAB>parents<TAB>log_weight per cached family.
    void dump(std::ostream& out) const;

private:
    FamilyCache(std::shared_ptr<const FamilyScorer> scorer, CacheOptions options, std::vector<Node> nodes)
        : scorer_(std::move(scorer)), options_(options), nodes_(std::move(nodes)) {}

    std::shared_ptr<const FamilyScorer> scorer_;
    CacheOptions options_;
    std::vector<Node> nodes_;
};

/// Convenience: scorer + cache over a dataset in one call.
FamilyCache build_family_cache(Dataset data, const ScoreParams& params, const CacheOptions& options,
                               int jobs = 1);

}  // namespace bnorder
