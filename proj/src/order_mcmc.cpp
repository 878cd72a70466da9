#include "bnorder/order_mcmc.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <ostream>
#include <stdexcept>

#include <fmt/format.h>

namespace bnorder {

std::string_view to_string(ProposalKind kind) {
    switch (kind) {
        case ProposalKind::flip: return "flip";
        case ProposalKind::cut: return "cut";
        case ProposalKind::add: return "add";
        case ProposalKind::remove: return "remove";
        case ProposalKind::reverse: return "reverse";
        case ProposalKind::none: return "none";
    }
    return "?";
}

void write_trace(std::ostream& out, std::span<const McmcTraceRecord> trace) {
    for (const auto& r : trace)
        out << fmt::format("{}\t{:.6f}\t{}\t{}\n", r.iteration, r.log_score / std::numbers::ln2,
                           to_string(r.proposal), r.accepted ? 1 : 0);
}

void OrderMcmcConfig::validate() const {
    if (!(p_flip >= 0.0 && p_flip <= 1.0)) throw std::invalid_argument("p_flip must lie in [0, 1]");
    if (burn_in < 0) throw std::invalid_argument("burn_in must be nonnegative");
    if (thin < 1) throw std::invalid_argument("thin must be at least 1");
    if (n_samples < 1) throw std::invalid_argument("n_samples must be at least 1");
    if (dags_per_order < 1) throw std::invalid_argument("dags_per_order must be at least 1");
}

Ordering random_ordering(int n, std::mt19937_64& rng) {
    std::vector<int> p(static_cast<std::size_t>(n));
    std::iota(p.begin(), p.end(), 0);
    std::shuffle(p.begin(), p.end(), rng);
    return Ordering(std::move(p));
}

OrderProposal propose(const Ordering& current, std::mt19937_64& rng, double p_flip) {
    const int n = current.size();
    if (n < 2) throw std::invalid_argument("proposals need at least two variables");
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    OrderProposal out{current, ProposalKind::flip, 0, 0};
    if (unif(rng) < p_flip) {
        int a = std::uniform_int_distribution<int>(0, n - 1)(rng);
        int b = std::uniform_int_distribution<int>(0, n - 2)(rng);
        if (b >= a) ++b;
        if (a > b) std::swap(a, b);
        out.first = a;
        out.second = b;
        out.ordering.swap_positions(a, b);
    } else {
        const int j = std::uniform_int_distribution<int>(1, n - 1)(rng);
        out.kind = ProposalKind::cut;
        out.first = j;
        out.ordering.cut(j);
    }
    return out;
}

bool accept(double log_score_old, double log_score_new, std::mt19937_64& rng) {
    const double u = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
    return std::log(u) < log_score_new - log_score_old || log_score_new >= log_score_old;
}

OrderChainResult run_chain(const FamilyCache& cache, const OrderMcmcConfig& config) {
    config.validate();
    const int n = cache.num_vars();
    std::mt19937_64 rng(config.seed);
    Ordering start = config.initial ? *config.initial : random_ordering(n, rng);
    if (start.size() != n) throw std::invalid_argument("initial ordering has the wrong size");

    OrderScoreState state(cache, start);
    OrderScoreState spare = state;
    OrderChainResult result;
    const long total = config.burn_in + config.thin * config.n_samples;
    result.trace.reserve(static_cast<std::size_t>(total));
    result.samples.reserve(static_cast<std::size_t>(config.n_samples));

    for (long it = 1; it <= total; ++it) {
        McmcTraceRecord rec{it, state.total(), ProposalKind::none, false};
        if (n >= 2) {
            auto prop = propose(state.ordering(), rng, config.p_flip);
            rec.proposal = prop.kind;
            const double old_score = state.total();
            if (prop.kind == ProposalKind::flip) {
                state.flip(prop.first, prop.second);
                rec.accepted = accept(old_score, state.total(), rng);
                if (rec.accepted) {
                    if (config.paranoid) {
                        OrderScoreState fresh(cache, state.ordering());
                        if (std::abs(fresh.total() - state.total()) > 1e-9)
                            throw std::logic_error("incremental flip disagrees with full recomputation");
                    }
                } else {
                    state.flip(prop.first, prop.second);
                }
            } else {
                spare.reset(std::move(prop.ordering));
                rec.accepted = accept(old_score, spare.total(), rng);
                if (rec.accepted) std::swap(state, spare);
            }
            rec.log_score = state.total();
        }
        result.trace.push_back(rec);
        if (it > config.burn_in && (it - config.burn_in) % config.thin == 0) result.samples.push_back(state.ordering());
    }
    return result;
}

FeaturePosteriorTable estimate_features(std::span<const Ordering> samples, const FamilyCache& cache,
                                        FeatureKind kind, int dags_per_order, std::uint64_t seed) {
    if (samples.empty()) throw std::invalid_argument("no ordering samples");
    if (dags_per_order < 1) throw std::invalid_argument("dags_per_order must be at least 1");
    const int n = cache.num_vars();
    FeaturePosteriorTable t;
    t.kind = kind;
    t.names = cache.scorer().data().names();
    t.n_samples = samples.size();
    t.estimates = Eigen::MatrixXd::Zero(n, n);
    std::mt19937_64 rng(seed);
    for (const auto& ord : samples) {
        const OrderScoreState state(cache, ord);
        switch (kind) {
            case FeatureKind::edge: t.estimates += edge_posteriors(state); break;
            case FeatureKind::markov: t.estimates += markov_posteriors(state); break;
            case FeatureKind::path: {
                Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(n, n);
                for (int d = 0; d < dags_per_order; ++d)
                    acc += feature_indicators(sample_dag_given_order(state, rng), FeatureKind::path);
                t.estimates += acc / dags_per_order;
                break;
            }
        }
    }
    t.estimates /= static_cast<double>(samples.size());
    t.estimates = t.estimates.cwiseMax(0.0).cwiseMin(1.0);
    return t;
}

}  // namespace bnorder
