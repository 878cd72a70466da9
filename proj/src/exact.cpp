#include "bnorder/exact.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <fmt/format.h>

#include "bnorder/errors.hpp"

namespace bnorder {

namespace {

struct DagEnumerator {
    int n;
    std::vector<std::vector<ScoredFamily>> choices;
    const std::function<void(const Dag&, double)>& visit;
    Dag g;
    std::vector<NodeSet> children;

    bool reaches(int from, int target) const {
        NodeSet seen = NodeSet::single(from);
        std::vector<int> stack{from};
        while (!stack.empty()) {
            const int v = stack.back();
            stack.pop_back();
            for (int c : (children[static_cast<std::size_t>(v)] - seen).members()) {
                if (c == target) return true;
                seen.insert(c);
                stack.push_back(c);
            }
        }
        return false;
    }

    void assign(int v, double acc) {
        if (v == n) {
            visit(g, acc);
            return;
        }
        for (const auto& f : choices[static_cast<std::size_t>(v)]) {
            // The partial graph is acyclic; a new cycle must pass through v.
            bool cyclic = false;
            for (int p : f.parents.members())
                if (reaches(v, p)) {
                    cyclic = true;
                    break;
                }
            if (cyclic) continue;
            g.set_parents(v, f.parents);
            for (int p : f.parents.members()) children[static_cast<std::size_t>(p)].insert(v);
            assign(v + 1, acc + f.log_weight);
            for (int p : f.parents.members()) children[static_cast<std::size_t>(p)].erase(v);
            g.set_parents(v, NodeSet{});
        }
    }
};

void check_cap(int n, int cap, const char* what) {
    if (n > cap)
        throw CapExceeded(fmt::format("{} is limited to {} variables, dataset has {}", what, cap, n));
}

}  // namespace

void enumerate_dags(const FamilyScorer& scorer, const std::function<void(const Dag&, double)>& visit, int cap) {
    const int n = scorer.num_vars();
    check_cap(n, cap, "DAG enumeration");
    DagEnumerator e{n, {}, visit, Dag(n), std::vector<NodeSet>(static_cast<std::size_t>(n))};
    const std::vector<double> no_deltas(static_cast<std::size_t>(n), 0.0);
    for (int i = 0; i < n; ++i)
        e.choices.push_back(
            enumerate_families_pruned(scorer, i, NodeSet::range(n).without(i), no_deltas, false, 0.0));
    e.assign(0, 0.0);
}

namespace {

// Two passes over the DAG space: the global max first, then weighted sums.
template <class Accumulate>
double normalized_dag_sum(const FamilyScorer& scorer, int cap, Accumulate&& add) {
    double hi = -std::numeric_limits<double>::infinity();
    enumerate_dags(scorer, [&](const Dag&, double w) { hi = std::max(hi, w); }, cap);
    double z = 0.0;
    enumerate_dags(
        scorer,
        [&](const Dag& g, double w) {
            const double p = std::exp(w - hi);
            z += p;
            add(g, p);
        },
        cap);
    return z;
}

}  // namespace

double exact_feature_posterior_dags(const FamilyScorer& scorer, const std::function<bool(const Dag&)>& feature,
                                    int cap) {
    double num = 0.0;
    const double z = normalized_dag_sum(scorer, cap, [&](const Dag& g, double p) {
        if (feature(g)) num += p;
    });
    return std::clamp(num / z, 0.0, 1.0);
}

Eigen::MatrixXd exact_feature_table_dags(const FamilyScorer& scorer, FeatureKind kind, int cap) {
    const int n = scorer.num_vars();
    Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(n, n);
    const double z = normalized_dag_sum(scorer, cap, [&](const Dag& g, double p) {
        acc += p * feature_indicators(g, kind);
    });
    return (acc / z).cwiseMax(0.0).cwiseMin(1.0);
}

std::vector<std::pair<Ordering, double>> ordering_log_marginals(const FamilyCache& cache, int cap) {
    const int n = cache.num_vars();
    check_cap(n, cap, "ordering enumeration");
    std::vector<int> perm(static_cast<std::size_t>(n));
    std::iota(perm.begin(), perm.end(), 0);
    std::vector<std::pair<Ordering, double>> out;
    do {
        Ordering ord(perm);
        const OrderScoreState state(cache, ord);
        out.emplace_back(std::move(ord), state.total());
    } while (std::next_permutation(perm.begin(), perm.end()));
    return out;
}

namespace {

void enumerate_consistent(const OrderScoreState& state, int v, double prob, Dag& g, Eigen::MatrixXd& acc) {
    const int n = state.num_vars();
    if (v == n) {
        acc += prob * feature_indicators(g, FeatureKind::path);
        return;
    }
    const auto& nf = state.node(v);
    for (const auto& f : nf.families) {
        g.set_parents(v, f.parents);
        enumerate_consistent(state, v + 1, prob * std::exp(f.log_weight - nf.log_sum), g, acc);
    }
    g.set_parents(v, NodeSet{});
}

}  // namespace

Eigen::MatrixXd path_posteriors_given_order(const OrderScoreState& state) {
    const int n = state.num_vars();
    Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(n, n);
    Dag g(n);
    enumerate_consistent(state, 0, 1.0, g, acc);
    return acc;
}

Eigen::MatrixXd exact_feature_table_orders(const FamilyCache& cache, FeatureKind kind, int dags_per_order,
                                           std::uint64_t seed, int cap) {
    const int n = cache.num_vars();
    const auto marginals = ordering_log_marginals(cache, cap);
    double hi = -std::numeric_limits<double>::infinity();
    for (const auto& [ord, lm] : marginals) hi = std::max(hi, lm);

    std::mt19937_64 rng(seed);
    Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(n, n);
    double z = 0.0;
    for (const auto& [ord, lm] : marginals) {
        const double w = std::exp(lm - hi);
        z += w;
        const OrderScoreState state(cache, ord);
        switch (kind) {
            case FeatureKind::edge: acc += w * edge_posteriors(state); break;
            case FeatureKind::markov: acc += w * markov_posteriors(state); break;
            case FeatureKind::path:
                if (n <= 5) {
                    acc += w * path_posteriors_given_order(state);
                } else {
                    Eigen::MatrixXd p = Eigen::MatrixXd::Zero(n, n);
                    for (int d = 0; d < dags_per_order; ++d)
                        p += feature_indicators(sample_dag_given_order(state, rng), FeatureKind::path);
                    acc += (w / dags_per_order) * p;
                }
                break;
        }
    }
    return (acc / z).cwiseMax(0.0).cwiseMin(1.0);
}

double exact_feature_posterior_orders(const FamilyCache& cache, FeatureKind kind, int i, int j) {
    if (i == j) return 0.0;
    return exact_feature_table_orders(cache, kind)(i, j);
}

}  // namespace bnorder
