#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <random>
#include <span>
#include <string_view>
#include <vector>

#include "bnorder/family_cache.hpp"
#include "bnorder/features.hpp"
#include "bnorder/order.hpp"

namespace bnorder {

/// Ordering moves (flip, cut) and structure moves (add, remove, reverse).
enum class ProposalKind { flip, cut, add, remove, reverse, none };
std::string_view to_string(ProposalKind kind);

struct McmcTraceRecord {
    long iteration = 0;
    /// Natural-log score of the current state after this iteration, up to a constant.
    double log_score = 0.0;
    ProposalKind proposal = ProposalKind::none;
    bool accepted = false;
};

/// Writes `iteration<TAB>log_score<TAB>proposal<TAB>accepted` lines, log_score in bits.
void write_trace(std::ostream& out, std::span<const McmcTraceRecord> trace);

struct OrderMcmcConfig {
    double p_flip = 0.9;
    long burn_in = 10'000;
    long thin = 2'500;
    int n_samples = 50;
    int dags_per_order = 10;
    std::uint64_t seed = 0;
    /// Cross-check every accepted flip against a full recomputation.
    bool paranoid = false;
    /// Starting ordering; a seeded random permutation when absent.
    std::optional<Ordering> initial;

    void validate() const;
};

struct OrderProposal {
    Ordering ordering;
    ProposalKind kind = ProposalKind::none;
    /// Swapped positions (flip) or the cut point in `first` (cut).
    int first = 0;
    int second = 0;
};

/// Flip: a uniformly chosen unordered pair of positions is swapped.
/// Cut: j uniform in {1..n-1}, then rotate left by j.
OrderProposal propose(const Ordering& current, std::mt19937_64& rng, double p_flip);

/// Metropolis test for a symmetric proposal under a uniform ordering prior.
/// Always draws exactly one uniform from `rng`.
bool accept(double log_score_old, double log_score_new, std::mt19937_64& rng);

struct OrderChainResult {
    std::vector<McmcTraceRecord> trace;
    std::vector<Ordering> samples;
};

/// burn_in iterations, then one retained ordering every `thin` iterations
/// until n_samples are collected. One trace record per iteration.
OrderChainResult run_chain(const FamilyCache& cache, const OrderMcmcConfig& config);

/// Averages per-ordering feature posteriors over `samples`: closed forms for
/// edge and markov, `dags_per_order` sampled DAGs per ordering for paths.
FeaturePosteriorTable estimate_features(std::span<const Ordering> samples, const FamilyCache& cache,
                                        FeatureKind kind, int dags_per_order, std::uint64_t seed);

/// Uniform random permutation of 0..n-1.
Ordering random_ordering(int n, std::mt19937_64& rng);

}  // namespace bnorder
