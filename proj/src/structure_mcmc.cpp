#include "bnorder/structure_mcmc.hpp"

#include <cmath>
#include <stdexcept>

namespace bnorder {

namespace {

// Is `to` reachable from `from` once the edge skip_from -> skip_to is ignored?
bool reachable_without(const std::vector<NodeSet>& children, int from, int to, int skip_from,
                       int skip_to) {
    NodeSet seen = NodeSet::single(from);
    std::vector<int> stack{from};
    while (!stack.empty()) {
        const int v = stack.back();
        stack.pop_back();
        NodeSet next = children[static_cast<std::size_t>(v)];
        if (v == skip_from) next.erase(skip_to);
        for (int c : (next - seen).members()) {
            if (c == to) return true;
            seen.insert(c);
            stack.push_back(c);
        }
    }
    return false;
}

ProposalKind proposal_of(MoveKind k) {
    switch (k) {
        case MoveKind::add: return ProposalKind::add;
        case MoveKind::remove: return ProposalKind::remove;
        case MoveKind::reverse: return ProposalKind::reverse;
    }
    return ProposalKind::none;
}

}  // namespace

std::vector<StructureMove> legal_moves(const Dag& g, std::span<const NodeSet> candidates, int max_parents) {
    const int n = g.num_nodes();
    const auto reach = g.descendants();
    const auto children = g.children();
    std::vector<StructureMove> moves;
    for (int child = 0; child < n; ++child) {
        const NodeSet pa = g.parents(child);
        for (int parent = 0; parent < n; ++parent) {
            if (parent == child) continue;
            if (pa.contains(parent)) {
                moves.push_back({MoveKind::remove, parent, child});
                // parent -> child becomes child -> parent
                if (candidates[static_cast<std::size_t>(parent)].contains(child) &&
                    g.parents(parent).size() < max_parents &&
                    !reachable_without(children, parent, child, parent, child))
                    moves.push_back({MoveKind::reverse, parent, child});
            } else if (candidates[static_cast<std::size_t>(child)].contains(parent) && pa.size() < max_parents &&
                       !reach[static_cast<std::size_t>(child)].contains(parent)) {
                moves.push_back({MoveKind::add, parent, child});
            }
        }
    }
    return moves;
}

std::vector<StructureMove> legal_moves(const Dag& g, const FamilyCache& cache) {
    std::vector<NodeSet> cand(static_cast<std::size_t>(cache.num_vars()));
    for (int i = 0; i < cache.num_vars(); ++i) cand[static_cast<std::size_t>(i)] = cache.candidates(i);
    return legal_moves(g, std::span<const NodeSet>(cand), cache.max_parents());
}

Dag apply_move(Dag g, const StructureMove& m) {
    switch (m.kind) {
        case MoveKind::add: g.add_edge(m.from, m.to); break;
        case MoveKind::remove: g.remove_edge(m.from, m.to); break;
        case MoveKind::reverse:
            g.remove_edge(m.from, m.to);
            g.add_edge(m.to, m.from);
            break;
    }
    return g;
}

double move_delta(const Dag& g, const StructureMove& m, const FamilyScorer& scorer) {
    const NodeSet pa_to = g.parents(m.to);
    switch (m.kind) {
        case MoveKind::add: return scorer.log_weight(m.to, pa_to.with(m.from)) - scorer.log_weight(m.to, pa_to);
        case MoveKind::remove: return scorer.log_weight(m.to, pa_to.without(m.from)) - scorer.log_weight(m.to, pa_to);
        case MoveKind::reverse: {
            const NodeSet pa_from = g.parents(m.from);
            return scorer.log_weight(m.to, pa_to.without(m.from)) - scorer.log_weight(m.to, pa_to) +
                   scorer.log_weight(m.from, pa_from.with(m.to)) - scorer.log_weight(m.from, pa_from);
        }
    }
    return 0.0;
}

namespace {

std::vector<NodeSet> candidate_sets(const FamilyCache& cache) {
    std::vector<NodeSet> cand(static_cast<std::size_t>(cache.num_vars()));
    for (int i = 0; i < cache.num_vars(); ++i) cand[static_cast<std::size_t>(i)] = cache.candidates(i);
    return cand;
}

struct StepOutcome {
    StructureStep step;
    ProposalKind kind = ProposalKind::none;
};

StepOutcome step_with(Dag& g, const std::vector<StructureMove>& moves, std::span<const NodeSet> cand,
                      const FamilyCache& cache, std::mt19937_64& rng) {
    const auto& m = moves[std::uniform_int_distribution<std::size_t>(0, moves.size() - 1)(rng)];
    Dag next = apply_move(g, m);
    const double delta = move_delta(g, m, cache.scorer());
    const auto back = legal_moves(next, cand, cache.max_parents()).size();
    const double log_ratio = delta + std::log(static_cast<double>(moves.size())) - std::log(static_cast<double>(back));
    StepOutcome out{{accept(0.0, log_ratio, rng), delta}, proposal_of(m.kind)};
    if (out.step.accepted) g = std::move(next);
    return out;
}

}  // namespace

StructureStep structure_step(Dag& g, const FamilyCache& cache, std::mt19937_64& rng) {
    const auto cand = candidate_sets(cache);
    const auto moves = legal_moves(g, cand, cache.max_parents());
    if (moves.empty()) throw std::logic_error("no legal structure moves");
    return step_with(g, moves, cand, cache, rng).step;
}

void StructureMcmcConfig::validate() const {
    if (burn_in < 0) throw std::invalid_argument("burn_in must be nonnegative");
    if (thin < 1) throw std::invalid_argument("thin must be at least 1");
    if (n_samples < 1) throw std::invalid_argument("n_samples must be at least 1");
}

StructureChainResult run_structure_chain(const FamilyCache& cache, const StructureMcmcConfig& config) {
    config.validate();
    const int n = cache.num_vars();
    std::mt19937_64 rng(config.seed);
    Dag g = config.initial ? *config.initial : Dag(n);
    if (g.num_nodes() != n || !g.is_acyclic()) throw std::invalid_argument("initial graph is not a DAG over the data");
    double score = cache.scorer().log_weight(g);

    StructureChainResult out;
    const long total = config.burn_in + config.thin * config.n_samples;
    out.trace.reserve(static_cast<std::size_t>(total));
    const auto cand = candidate_sets(cache);

    for (long it = 1; it <= total; ++it) {
        McmcTraceRecord rec{it, score, ProposalKind::none, false};
        const auto moves = legal_moves(g, cand, cache.max_parents());
        if (!moves.empty()) {
            const auto o = step_with(g, moves, cand, cache, rng);
            rec.proposal = o.kind;
            rec.accepted = o.step.accepted;
            if (o.step.accepted) score += o.step.delta;
        }
        rec.log_score = score;
        out.trace.push_back(rec);
        if (it > config.burn_in && (it - config.burn_in) % config.thin == 0) out.samples.push_back(g);
    }
    return out;
}

FeaturePosteriorTable dag_feature_frequencies(std::span<const Dag> samples, const std::vector<std::string>& names,
                                              FeatureKind kind) {
    if (samples.empty()) throw std::invalid_argument("no graph samples");
    const int n = static_cast<int>(names.size());
    FeaturePosteriorTable t;
    t.kind = kind;
    t.names = names;
    t.n_samples = samples.size();
    t.estimates = Eigen::MatrixXd::Zero(n, n);
    for (const auto& g : samples) t.estimates += feature_indicators(g, kind);
    t.estimates /= static_cast<double>(samples.size());
    return t;
}

}  // namespace bnorder
