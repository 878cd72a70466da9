#include "bnorder/order.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include <fmt/format.h>

namespace bnorder {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double log_sum_of(const std::vector<ScoredFamily>& fams) {
    double hi = kNegInf;
    for (const auto& f : fams) hi = std::max(hi, f.log_weight);
    if (!std::isfinite(hi)) return hi;
    double acc = 0.0;
    for (const auto& f : fams) acc += std::exp(f.log_weight - hi);
    return hi + std::log(acc);
}

bool needs_fallback(const FamilyCache& cache, int node, const std::vector<ScoredFamily>& extracted) {
    const auto& cn = cache.node(node);
    if (cn.complete) return false;
    return extracted.front().log_weight < cn.floor + cache.options().gamma_nats();
}

}  // namespace

Ordering::Ordering(std::vector<int> perm) : perm_(std::move(perm)), pos_(perm_.size(), -1) {
    const int n = size();
    for (int p = 0; p < n; ++p) {
        const int v = perm_[static_cast<std::size_t>(p)];
        if (v < 0 || v >= n || pos_[static_cast<std::size_t>(v)] != -1)
            throw std::invalid_argument("ordering is not a permutation");
        pos_[static_cast<std::size_t>(v)] = p;
    }
}

Ordering Ordering::identity(int n) {
    std::vector<int> p(static_cast<std::size_t>(n));
    std::iota(p.begin(), p.end(), 0);
    return Ordering(std::move(p));
}

NodeSet Ordering::predecessors(int node) const {
    NodeSet s;
    for (int p = 0; p < position(node); ++p) s.insert(perm_[static_cast<std::size_t>(p)]);
    return s;
}

void Ordering::swap_positions(int a, int b) {
    std::swap(perm_[static_cast<std::size_t>(a)], perm_[static_cast<std::size_t>(b)]);
    pos_[static_cast<std::size_t>(perm_[static_cast<std::size_t>(a)])] = a;
    pos_[static_cast<std::size_t>(perm_[static_cast<std::size_t>(b)])] = b;
}

void Ordering::cut(int j) {
    if (j < 0 || j > size()) throw std::invalid_argument("cut point out of range");
    std::rotate(perm_.begin(), perm_.begin() + j, perm_.end());
    for (int p = 0; p < size(); ++p) pos_[static_cast<std::size_t>(perm_[static_cast<std::size_t>(p)])] = p;
}

NodeFamilies consistent_families(const FamilyCache& cache, int node, NodeSet predecessors) {
    NodeFamilies out;
    const auto& cn = cache.node(node);
    bool has_empty = false;
    for (std::uint32_t idx = 0; idx < cn.families.size(); ++idx) {
        const auto& f = cn.families[idx];
        if (!predecessors.contains_all(f.parents)) continue;
        has_empty = has_empty || f.parents.empty();
        out.families.push_back(f);
        out.cache_index.push_back(idx);
    }
    if (!has_empty) {
        out.families.push_back({NodeSet{}, cn.empty_log_weight});
        out.cache_index.push_back(kEmptyOutsideCache);
    }
    if (needs_fallback(cache, node, out.families)) {
        const auto& opt = cache.options();
        out.from_cache = false;
        out.cache_index.clear();
        out.families = enumerate_families_pruned(cache.scorer(), node, cn.candidates & predecessors, cn.deltas,
                                                 opt.prune, opt.gamma_nats());
    }
    out.log_sum = log_sum_of(out.families);
    return out;
}

OrderScoreState::OrderScoreState(const FamilyCache& cache, Ordering ordering)
    : cache_(&cache), ordering_(std::move(ordering)) {
    if (ordering_.size() != cache.num_vars())
        throw std::invalid_argument(fmt::format("ordering has {} nodes, cache has {}", ordering_.size(), cache.num_vars()));
    const auto n = static_cast<std::size_t>(ordering_.size());
    nodes_.resize(n);
    contain_.resize(n);
    pairs_.resize(n);
    for (int i = 0; i < ordering_.size(); ++i) recompute_node(i);
    refresh_total();
}

void OrderScoreState::reset(Ordering ordering) {
    if (ordering.size() != num_vars()) throw std::invalid_argument("ordering size changed");
    ordering_ = std::move(ordering);
    for (int i = 0; i < num_vars(); ++i) recompute_node(i);
    refresh_total();
}

void OrderScoreState::recompute_node(int i) {
    nodes_[static_cast<std::size_t>(i)] = consistent_families(*cache_, i, ordering_.predecessors(i));
    invalidate(i);
}

void OrderScoreState::invalidate(int i) {
    contain_[static_cast<std::size_t>(i)].clear();
    pairs_[static_cast<std::size_t>(i)].resize(0, 0);
}

void OrderScoreState::refresh_total() {
    double t = 0.0;
    for (const auto& nf : nodes_) t += nf.log_sum;
    total_ = t;
}

void OrderScoreState::flip(int a, int b, bool paranoid) {
    if (a == b) return;
    if (a > b) std::swap(a, b);
    if (a < 0 || b >= num_vars()) throw std::out_of_range("flip position out of range");
    const int later = ordering_.at(a);    // moves to position b
    const int earlier = ordering_.at(b);  // moves to position a
    ordering_.swap_positions(a, b);
    recompute_node(later);
    recompute_node(earlier);

    for (int p = a + 1; p < b; ++p) {
        const int l = ordering_.at(p);
        const auto& cn = cache_->node(l);
        if (!cn.candidates.contains(later) && !cn.candidates.contains(earlier)) continue;
        auto& nf = nodes_[static_cast<std::size_t>(l)];
        if (!nf.from_cache) {
            recompute_node(l);
            continue;
        }
        // Drop families that used `later` as a parent, add the cached ones that
        // use `earlier` and are now fully preceding.
        const NodeSet preds = ordering_.predecessors(l);
        std::vector<std::uint32_t> added;
        for (std::uint32_t idx : cn.containing[static_cast<std::size_t>(earlier)]) {
            const NodeSet ps = cn.families[idx].parents;
            if (!ps.contains(later) && preds.contains_all(ps)) added.push_back(idx);
        }
        NodeFamilies next;
        std::size_t s = 0, t = 0;
        auto take_old = [&] {
            if (!nf.families[s].parents.contains(later)) {
                next.families.push_back(nf.families[s]);
                next.cache_index.push_back(nf.cache_index[s]);
            }
            ++s;
        };
        auto take_new = [&] {
            next.families.push_back(cn.families[added[t]]);
            next.cache_index.push_back(added[t]);
            ++t;
        };
        while (s < nf.families.size() || t < added.size()) {
            if (t == added.size() || (s < nf.families.size() && nf.cache_index[s] < added[t]))
                take_old();
            else
                take_new();
        }
        if (needs_fallback(*cache_, l, next.families)) {
            recompute_node(l);
            continue;
        }
        next.log_sum = log_sum_of(next.families);
        nf = std::move(next);
        invalidate(l);
    }
    refresh_total();

    if (paranoid) {
        OrderScoreState fresh(*cache_, ordering_);
        for (int i = 0; i < num_vars(); ++i)
            if (std::abs(fresh.node_log_sum(i) - node_log_sum(i)) > 1e-9)
                throw std::logic_error(fmt::format("flip update diverged at node {}: {} vs {}", i,
                                                   node_log_sum(i), fresh.node_log_sum(i)));
        if (std::abs(fresh.total() - total()) > 1e-9) throw std::logic_error("flip update total diverged");
    }
}

double OrderScoreState::contain_log_sum(int child, int parent) const {
    auto& c = contain_[static_cast<std::size_t>(child)];
    if (c.empty()) {
        const auto& nf = node(child);
        double hi = kNegInf;
        for (const auto& f : nf.families) hi = std::max(hi, f.log_weight);
        std::vector<double> acc(static_cast<std::size_t>(num_vars()), 0.0);
        for (const auto& f : nf.families) {
            const double w = std::exp(f.log_weight - hi);
            for (int y : f.parents.members()) acc[static_cast<std::size_t>(y)] += w;
        }
        c.resize(acc.size());
        for (std::size_t y = 0; y < acc.size(); ++y) c[y] = acc[y] > 0.0 ? hi + std::log(acc[y]) : kNegInf;
    }
    return c[static_cast<std::size_t>(parent)];
}

double OrderScoreState::pair_probability(int child, int a, int b) const {
    auto& m = pairs_[static_cast<std::size_t>(child)];
    if (m.size() == 0) {
        const int n = num_vars();
        m = Eigen::MatrixXd::Zero(n, n);
        const auto& nf = node(child);
        for (const auto& f : nf.families) {
            if (f.parents.size() < 2) continue;
            const double p = std::exp(f.log_weight - nf.log_sum);
            const auto mem = f.parents.members();
            for (std::size_t x = 0; x < mem.size(); ++x)
                for (std::size_t y = x + 1; y < mem.size(); ++y) m(mem[x], mem[y]) += p;
        }
    }
    if (a > b) std::swap(a, b);
    return std::min(1.0, m(a, b));
}

OrderScoreState log_marginal_given_order(const Ordering& ordering, const FamilyCache& cache) {
    return OrderScoreState(cache, ordering);
}

OrderScoreState flip_update(const OrderScoreState& state, int a, int b, bool paranoid) {
    OrderScoreState next = state;
    next.flip(a, b, paranoid);
    return next;
}

double edge_posterior(int parent, int child, const OrderScoreState& state) {
    if (parent == child) throw std::domain_error("edge feature needs two distinct nodes");
    if (!state.ordering().precedes(parent, child)) return 0.0;
    const double c = state.contain_log_sum(child, parent);
    if (c == kNegInf) return 0.0;
    return std::clamp(std::exp(c - state.node_log_sum(child)), 0.0, 1.0);
}

double family_posterior(int child, NodeSet parents, const OrderScoreState& state) {
    if (parents.contains(child) || !state.ordering().predecessors(child).contains_all(parents))
        throw std::domain_error("parent set is not consistent with the ordering");
    for (const auto& f : state.node(child).families)
        if (f.parents == parents) return std::exp(f.log_weight - state.node_log_sum(child));
    return 0.0;
}

double markov_posterior(int i, int j, const OrderScoreState& state) {
    if (i == j) throw std::domain_error("markov feature needs two distinct nodes");
    const auto& ord = state.ordering();
    const int first = ord.precedes(i, j) ? i : j;
    const int second = first == i ? j : i;
    double none = 1.0 - edge_posterior(first, second, state);
    for (int p = ord.position(second) + 1; p < ord.size(); ++p)
        none *= 1.0 - state.pair_probability(ord.at(p), first, second);
    return std::clamp(1.0 - none, 0.0, 1.0);
}

Eigen::MatrixXd edge_posteriors(const OrderScoreState& state) {
    const int n = state.num_vars();
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (i != j) m(i, j) = edge_posterior(i, j, state);
    return m;
}

Eigen::MatrixXd markov_posteriors(const OrderScoreState& state) {
    const int n = state.num_vars();
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) m(i, j) = m(j, i) = markov_posterior(i, j, state);
    return m;
}

Dag sample_dag_given_order(const OrderScoreState& state, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    Dag g(state.num_vars());
    for (int i = 0; i < state.num_vars(); ++i) {
        const auto& nf = state.node(i);
        const double draw = unif(rng);
        double acc = 0.0;
        NodeSet pick = nf.families.back().parents;
        for (const auto& f : nf.families) {
            acc += std::exp(f.log_weight - nf.log_sum);
            if (draw < acc) {
                pick = f.parents;
                break;
            }
        }
        g.set_parents(i, pick);
    }
    return g;
}

Dag sample_dag_given_order(const OrderScoreState& state, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    return sample_dag_given_order(state, rng);
}

}  // namespace bnorder
