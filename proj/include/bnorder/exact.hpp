#pragma once

#include <functional>
#include <vector>

#include <Eigen/Core>

#include "bnorder/dag.hpp"
#include "bnorder/family_cache.hpp"
#include "bnorder/features.hpp"
#include "bnorder/order.hpp"
#include "bnorder/score.hpp"

namespace bnorder {

inline constexpr int kMaxDagEnumerationVars = 6;
inline constexpr int kMaxOrderEnumerationVars = 8;

/// Calls visit(g, Σ_i log ρ·score) once for every acyclic graph over the
/// scorer's variables with indegree <= k. Throws CapExceeded above `cap`.
void enumerate_dags(const FamilyScorer& scorer, const std::function<void(const Dag&, double)>& visit,
                    int cap = kMaxDagEnumerationVars);

/// Σ_G f(G) P(G | D) over all bounded-indegree DAGs.
double exact_feature_posterior_dags(const FamilyScorer& scorer, const std::function<bool(const Dag&)>& feature,
                                    int cap = kMaxDagEnumerationVars);
/// The full table for one feature kind, in one enumeration pass.
Eigen::MatrixXd exact_feature_table_dags(const FamilyScorer& scorer, FeatureKind kind,
                                         int cap = kMaxDagEnumerationVars);

/// Every ordering with its log P(D | ≺) (shared unknown constant), in
/// lexicographic permutation order. Throws CapExceeded above `cap`.
std::vector<std::pair<Ordering, double>> ordering_log_marginals(const FamilyCache& cache,
                                                                int cap = kMaxOrderEnumerationVars);

/// Σ_≺ P(≺ | D) P(f | ≺, D) under a uniform ordering prior. Edge and markov
/// use the per-ordering closed forms. Paths are enumerated exactly over the
/// consistent DAGs of each ordering when n <= 5, otherwise estimated from
/// `dags_per_order` sampled graphs per ordering.
Eigen::MatrixXd exact_feature_table_orders(const FamilyCache& cache, FeatureKind kind, int dags_per_order = 2000,
                                           std::uint64_t seed = 0, int cap = kMaxOrderEnumerationVars);

/// Single-feature convenience wrappers.
double exact_feature_posterior_orders(const FamilyCache& cache, FeatureKind kind, int i, int j);

/// Per-ordering P(i ~> j | ≺, D) by enumerating the consistent graphs (one
/// family choice per node). Intended for n <= 5.
Eigen::MatrixXd path_posteriors_given_order(const OrderScoreState& state);

}  // namespace bnorder
