#pragma once

#include <memory>
#include <mutex>
#include <unordered_map>
#include <vector>

#include "bnorder/dag.hpp"
#include "bnorder/dataset.hpp"
#include "bnorder/node_set.hpp"

namespace bnorder {

struct ScoreParams {
    /// Equivalent sample size of the BDeu Dirichlet prior.
    double ess = 1.0;
    /// Maximum indegree k.
    int max_parents = 3;
};

/// BDeu log marginal likelihood of one family from its counts:
///   Σ_u [lnΓ(α_u) − lnΓ(α_u + N_u)] + Σ_{u,x} [lnΓ(α_ux + N_ux) − lnΓ(α_ux)]
/// with α_ux = ess / (r q) and α_u = ess / q. Natural log.
/// Throws std::domain_error when α_ux underflows to zero.
double log_family_score(const CountTable& counts, double ess);

/// Structure prior term −ln C(n−1, |U|): uniform over family sizes, then
/// uniform over parent sets of that size.
double log_rho(int num_vars, int family_size);

/// Memoizing family scorer over one dataset.
///
/// Scores are pure functions of (child, parent set); the memo is guarded per
/// child, so a single scorer can be shared by concurrent readers.
class FamilyScorer {
public:
    /// Throws std::invalid_argument unless ess > 0 and max_parents >= 0.
    /// The indegree bound is clamped to n − 1.
    FamilyScorer(Dataset data, ScoreParams params);
    FamilyScorer(const FamilyScorer&) = delete;
    FamilyScorer& operator=(const FamilyScorer&) = delete;

    const Dataset& data() const { return data_; }
    const ScoreParams& params() const { return params_; }
    int num_vars() const { return data_.num_vars(); }
    int max_parents() const { return params_.max_parents; }

    /// log score(X_child, U | D), memoized.
    double log_score(int child, NodeSet parents) const;
    /// log ρ(X_child, U) + log score(X_child, U | D).
    double log_weight(int child, NodeSet parents) const {
        return log_rho(num_vars(), parents.size()) + log_score(child, parents);
    }
    /// Uncached score, for callers that should not grow the memo.
    double compute_log_score(int child, NodeSet parents) const;

    /// Σ_i log_weight(i, Pa_G(i)).
    double log_weight(const Dag& g) const;

private:
    struct Memo {
        std::mutex mutex;
        std::unordered_map<std::uint64_t, double> scores;
    };
    Dataset data_;
    ScoreParams params_;
    std::vector<std::unique_ptr<Memo>> memo_;
};

}  // namespace bnorder
