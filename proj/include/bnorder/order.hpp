#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "bnorder/dag.hpp"
#include "bnorder/family_cache.hpp"
#include "bnorder/node_set.hpp"

namespace bnorder {

/// A total order on variables. perm()[0] is first and can have no parents.
class Ordering {
public:
    Ordering() = default;
    /// Throws std::invalid_argument unless perm is a permutation of 0..n-1.
    explicit Ordering(std::vector<int> perm);
    static Ordering identity(int n);

    int size() const { return static_cast<int>(perm_.size()); }
    const std::vector<int>& perm() const { return perm_; }
    int at(int position) const { return perm_[static_cast<std::size_t>(position)]; }
    int position(int node) const { return pos_[static_cast<std::size_t>(node)]; }
    bool precedes(int a, int b) const { return position(a) < position(b); }
    /// Nodes strictly before `node`.
    NodeSet predecessors(int node) const;

    void swap_positions(int a, int b);
    /// (i_1..i_j i_{j+1}..i_n) -> (i_{j+1}..i_n i_1..i_j)
    void cut(int j);

    friend bool operator==(const Ordering& a, const Ordering& b) { return a.perm_ == b.perm_; }

private:
    std::vector<int> perm_;
    std::vector<int> pos_;
};

/// Sentinel cache index for an empty family that missed the top-m_F cut.
inline constexpr std::uint32_t kEmptyOutsideCache = std::numeric_limits<std::uint32_t>::max();

/// The families of one node consistent with an ordering, and their log-sum.
struct NodeFamilies {
    /// False when the γ test failed and the list came from direct enumeration.
    bool from_cache = true;
    std::vector<ScoredFamily> families;
    /// Parallel to `families` when from_cache.
    std::vector<std::uint32_t> cache_index;
    double log_sum = 0.0;
};

/// Families U ⊆ C_i preceding `node` with |U| <= k, read from the cache, or
/// enumerated directly when the best cached one is less than γ above the
/// cache floor. The empty family is always present.
NodeFamilies consistent_families(const FamilyCache& cache, int node, NodeSet predecessors);

/// Per-ordering sums over consistent families, with lazily computed
/// membership sums for the closed-form posteriors.
///
/// Owned by one chain; lazily filled members are not synchronized.
class OrderScoreState {
public:
    OrderScoreState(const FamilyCache& cache, Ordering ordering);

    const FamilyCache& cache() const { return *cache_; }
    const Ordering& ordering() const { return ordering_; }
    int num_vars() const { return ordering_.size(); }
    /// log P(D | ≺) up to an ordering-independent constant.
    double total() const { return total_; }
    double node_log_sum(int i) const { return nodes_[static_cast<std::size_t>(i)].log_sum; }
    const NodeFamilies& node(int i) const { return nodes_[static_cast<std::size_t>(i)]; }

    /// log Σ_{U ∋ parent} exp(log_weight(U)) over child's consistent families;
    /// -inf when no such family.
    double contain_log_sum(int child, int parent) const;
    /// P(parent, other ∈ Pa(child) | ≺, D).
    double pair_probability(int child, int a, int b) const;

    /// Swaps positions a and b, touching only affected nodes. With `paranoid`
    /// the result is checked against a full recomputation (std::logic_error on
    /// disagreement beyond 1e-9).
    void flip(int a, int b, bool paranoid = false);
    /// Replaces the ordering and recomputes every node.
    void reset(Ordering ordering);

private:
    void recompute_node(int i);
    void refresh_total();
    void invalidate(int i);

    const FamilyCache* cache_;
    Ordering ordering_;
    std::vector<NodeFamilies> nodes_;
    double total_ = 0.0;

    mutable std::vector<std::vector<double>> contain_;   // [child][parent], empty = not computed
    mutable std::vector<Eigen::MatrixXd> pairs_;         // [child](a, b), a < b; 0x0 = not computed
};

/// Σ_i log Σ_{U ∈ U_{i,≺}} ρ·score, together with the state behind it.
OrderScoreState log_marginal_given_order(const Ordering& ordering, const FamilyCache& cache);

/// Returns a new state for `state`'s ordering with positions a < b swapped.
OrderScoreState flip_update(const OrderScoreState& state, int a, int b, bool paranoid = false);

/// P(parent -> child | ≺, D); 0 when parent does not precede child.
/// std::domain_error when parent == child.
double edge_posterior(int parent, int child, const OrderScoreState& state);

/// P(Pa(child) = U | ≺, D); 0 for a consistent U outside the family list.
/// std::domain_error when U is not order-consistent.
double family_posterior(int child, NodeSet parents, const OrderScoreState& state);

/// P(i ∈ MB(j) | ≺, D) = 1 − (1 − p)·Π_l (1 − q_l). Symmetric in (i, j).
double markov_posterior(int i, int j, const OrderScoreState& state);

/// n x n tables: edges(i, j) = P(i -> j), markov symmetric with zero diagonal.
Eigen::MatrixXd edge_posteriors(const OrderScoreState& state);
Eigen::MatrixXd markov_posteriors(const OrderScoreState& state);

/// One family per node, drawn independently from its family posterior.
Dag sample_dag_given_order(const OrderScoreState& state, std::mt19937_64& rng);
Dag sample_dag_given_order(const OrderScoreState& state, std::uint64_t seed);

}  // namespace bnorder
