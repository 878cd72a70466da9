#include "bnorder/search.hpp"

#include <algorithm>
#include <atomic>
#include <numeric>
#include <stdexcept>
#include <thread>

#include "bnorder/structure_mcmc.hpp"

namespace bnorder {

namespace {

// Minimum gain for a move to count as an improvement.
constexpr double kMinGain = 1e-10;

Dag climb(const FamilyScorer& scorer, std::span<const NodeSet> candidates, Dag g) {
    for (;;) {
        const auto moves = legal_moves(g, candidates, scorer.max_parents());
        // legal_moves is sorted by (child, parent, kind), so the first maximum wins ties.
        const StructureMove* best = nullptr;
        double best_gain = kMinGain;
        for (const auto& m : moves) {
            const double gain = move_delta(g, m, scorer);
            if (gain > best_gain) {
                best_gain = gain;
                best = &m;
            }
        }
        if (!best) return g;
        g = apply_move(std::move(g), *best);
    }
}

}  // namespace

Dag random_legal_dag(int n, std::span<const NodeSet> candidates, int max_parents, std::mt19937_64& rng) {
    std::vector<int> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), rng);
    std::bernoulli_distribution coin(0.5);
    Dag g(n);
    NodeSet before;
    for (int v : order) {
        std::vector<int> pool = (candidates[static_cast<std::size_t>(v)] & before).members();
        std::shuffle(pool.begin(), pool.end(), rng);
        NodeSet ps;
        for (int p : pool)
            if (ps.size() < max_parents && coin(rng)) ps.insert(p);
        g.set_parents(v, ps);
        before.insert(v);
    }
    return g;
}

Dag greedy_hill_climb(const FamilyScorer& scorer, std::span<const NodeSet> candidates, const Dag& seed_graph,
                      int restarts, std::mt19937_64& rng) {
    if (seed_graph.num_nodes() != scorer.num_vars() || !seed_graph.is_acyclic())
        throw std::invalid_argument("seed graph is not a DAG over the data");
    Dag best = climb(scorer, candidates, seed_graph);
    double best_score = scorer.log_weight(best);
    for (int r = 1; r < restarts; ++r) {
        Dag g = climb(scorer, candidates, random_legal_dag(scorer.num_vars(), candidates, scorer.max_parents(), rng));
        const double s = scorer.log_weight(g);
        if (s > best_score) {
            best_score = s;
            best = std::move(g);
        }
    }
    return best;
}

Dag greedy_hill_climb(const FamilyCache& cache, const Dag& seed_graph, int restarts, std::mt19937_64& rng) {
    std::vector<NodeSet> cand(static_cast<std::size_t>(cache.num_vars()));
    for (int i = 0; i < cache.num_vars(); ++i) cand[static_cast<std::size_t>(i)] = cache.candidates(i);
    return greedy_hill_climb(cache.scorer(), cand, seed_graph, restarts, rng);
}

FeaturePosteriorTable bootstrap_confidence(const Dataset& data, const ScoreParams& params,
                                           const BootstrapConfig& config, FeatureKind kind) {
    if (config.replicates < 1) throw std::invalid_argument("need at least one bootstrap replicate");
    const int n = data.num_vars();
    const int m = data.num_rows();
    std::vector<Eigen::MatrixXd> found(static_cast<std::size_t>(config.replicates));

    auto replicate = [&](int b) {
        std::seed_seq seq{static_cast<std::uint32_t>(config.seed), static_cast<std::uint32_t>(config.seed >> 32),
                          static_cast<std::uint32_t>(b)};
        std::mt19937_64 rng(seq);
        std::uniform_int_distribution<int> pick(0, m - 1);
        std::vector<int> rows(static_cast<std::size_t>(m));
        for (auto& r : rows) r = pick(rng);
        const FamilyScorer scorer(data.select_rows(rows), params);
        const auto cand = select_candidates(scorer, std::max(1, config.max_candidates));
        const Dag g = greedy_hill_climb(scorer, cand, Dag(n), config.restarts, rng);
        found[static_cast<std::size_t>(b)] = feature_indicators(g, kind);
    };

    const int threads = std::clamp(config.jobs, 1, config.replicates);
    if (threads == 1) {
        for (int b = 0; b < config.replicates; ++b) replicate(b);
    } else {
        std::atomic<int> next{0};
        std::vector<std::jthread> pool;
        for (int t = 0; t < threads; ++t)
            pool.emplace_back([&] {
                for (int b = next++; b < config.replicates; b = next++) replicate(b);
            });
    }

    FeaturePosteriorTable t;
    t.kind = kind;
    t.names = data.names();
    t.n_samples = static_cast<std::size_t>(config.replicates);
    t.estimates = Eigen::MatrixXd::Zero(n, n);
    for (const auto& f : found) t.estimates += f;
    t.estimates /= config.replicates;
    return t;
}

}  // namespace bnorder
