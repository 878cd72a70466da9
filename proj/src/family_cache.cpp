#include "bnorder/family_cache.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numbers>
#include <ostream>
#include <stdexcept>
#include <thread>

#include <fmt/format.h>

namespace bnorder {

double CacheOptions::gamma_nats() const { return gamma_bits * std::numbers::ln2; }

std::vector<NodeSet> select_candidates(const FamilyScorer& scorer, int max_candidates) {
    if (max_candidates < 1) throw std::invalid_argument("max_candidates must be at least 1");
    const int n = scorer.num_vars();
    std::vector<NodeSet> out(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        if (n - 1 <= max_candidates) {
            out[static_cast<std::size_t>(i)] = NodeSet::range(n).without(i);
            continue;
        }
        std::vector<std::pair<double, int>> ranked;
        for (int j = 0; j < n; ++j)
            if (j != i) ranked.emplace_back(scorer.log_score(i, NodeSet::single(j)), j);
        std::stable_sort(ranked.begin(), ranked.end(),
                         [](const auto& a, const auto& b) { return a.first > b.first; });
        NodeSet c;
        for (int t = 0; t < max_candidates; ++t) c.insert(ranked[static_cast<std::size_t>(t)].second);
        out[static_cast<std::size_t>(i)] = c;
    }
    return out;
}

std::vector<ScoredFamily> enumerate_families_pruned(const FamilyScorer& scorer, int node, NodeSet allowed,
                                                    std::span<const double> deltas, bool prune,
                                                    double margin_nats) {
    const auto pool = allowed.members();
    const int k = scorer.max_parents();
    std::vector<ScoredFamily> out{{NodeSet{}, scorer.log_weight(node, NodeSet{})}};
    double best = out.front().log_weight;

    // Level by level, so each pruning decision sees every family of the
    // current size and smaller. A family of size s + 1 is kept when at least
    // one of its size-s subsets survived pruning.
    std::vector<ScoredFamily> level;
    if (k > 0)
        for (int y : pool) level.push_back({NodeSet::single(y), scorer.log_weight(node, NodeSet::single(y))});
    for (int size = 1; !level.empty(); ++size) {
        for (const auto& f : level) best = std::max(best, f.log_weight);
        out.insert(out.end(), level.begin(), level.end());
        if (size >= k) break;
        std::vector<NodeSet> next;
        for (const auto& f : level) {
            const NodeSet rest = allowed - f.parents;
            if (prune) {
                bool promising = false;
                for (int y : rest.members())
                    if (f.log_weight + deltas[static_cast<std::size_t>(y)] >= best - margin_nats) {
                        promising = true;
                        break;
                    }
                if (!promising) continue;
            }
            for (int y : rest.members()) next.push_back(f.parents.with(y));
        }
        std::sort(next.begin(), next.end(), [](NodeSet a, NodeSet b) { return lex_less(a, b); });
        next.erase(std::unique(next.begin(), next.end()), next.end());
        level.clear();
        for (NodeSet v : next) level.push_back({v, scorer.log_weight(node, v)});
    }
    return out;
}

namespace {

bool ranks_before(const ScoredFamily& a, const ScoredFamily& b) {
    if (a.log_weight != b.log_weight) return a.log_weight > b.log_weight;
    return lex_less(a.parents, b.parents);
}

FamilyCache::Node build_node(const FamilyScorer& scorer, const CacheOptions& opt, int i, NodeSet candidates) {
    const int n = scorer.num_vars();
    FamilyCache::Node node;
    node.candidates = candidates;
    node.deltas.assign(static_cast<std::size_t>(n), std::numeric_limits<double>::quiet_NaN());
    const double base = scorer.log_score(i, NodeSet{});
    for (int y : candidates.members())
        node.deltas[static_cast<std::size_t>(y)] = scorer.log_score(i, NodeSet::single(y)) - base;

    auto all = enumerate_families_pruned(scorer, i, candidates, node.deltas, opt.prune, opt.gamma_nats());
    node.empty_log_weight = all.front().log_weight;
    const std::size_t keep = std::min(opt.max_families, all.size());
    node.complete = keep == all.size();
    std::partial_sort(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(keep), all.end(), ranks_before);
    all.resize(keep);
    node.families = std::move(all);
    node.floor = node.families.back().log_weight;

    node.containing.assign(static_cast<std::size_t>(n), {});
    for (std::uint32_t idx = 0; idx < node.families.size(); ++idx)
        for (int y : node.families[idx].parents.members()) node.containing[static_cast<std::size_t>(y)].push_back(idx);
    return node;
}

}  // namespace

FamilyCache FamilyCache::build(std::shared_ptr<const FamilyScorer> scorer, const CacheOptions& options, int jobs) {
    if (options.max_families < 1) throw std::invalid_argument("max_families must be at least 1");
    if (!(options.gamma_bits > 0.0)) throw std::invalid_argument("gamma_bits must be positive");
    const int n = scorer->num_vars();
    const auto candidates = select_candidates(*scorer, std::max(1, options.max_candidates));
    std::vector<Node> nodes(static_cast<std::size_t>(n));

    std::atomic<int> next{0};
    auto work = [&] {
        for (int i = next++; i < n; i = next++)
            nodes[static_cast<std::size_t>(i)] = build_node(*scorer, options, i, candidates[static_cast<std::size_t>(i)]);
    };
    const int threads = std::clamp(jobs, 1, n);
    if (threads == 1) {
        work();
    } else {
        std::vector<std::jthread> pool;
        for (int t = 0; t < threads; ++t) pool.emplace_back(work);
    }
    return FamilyCache(std::move(scorer), options, std::move(nodes));
}

void FamilyCache::dump(std::ostream& out) const {
    for (int i = 0; i < num_vars(); ++i)
        for (const auto& f : families(i)) out << fmt::format("{}\t{}\t{:.10f}\n", i, f.parents.to_string(), f.log_weight);
}

FamilyCache build_family_cache(Dataset data, const ScoreParams& params, const CacheOptions& options, int jobs) {
    auto scorer = std::make_shared<const FamilyScorer>(std::move(data), params);
    return FamilyCache::build(std::move(scorer), options, jobs);
}

}  // namespace bnorder
