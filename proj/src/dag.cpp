#include "bnorder/dag.hpp"

#include <algorithm>
#include <stdexcept>

namespace bnorder {

int Dag::num_edges() const {
    int e = 0;
    for (auto p : parents_) e += p.size();
    return e;
}

int Dag::max_indegree() const {
    int k = 0;
    for (auto p : parents_) k = std::max(k, p.size());
    return k;
}

std::vector<NodeSet> Dag::children() const {
    std::vector<NodeSet> ch(parents_.size());
    for (int c = 0; c < num_nodes(); ++c)
        for (int p : parents(c).members()) ch[static_cast<std::size_t>(p)].insert(c);
    return ch;
}

std::vector<int> Dag::topological_order() const {
    const int n = num_nodes();
    std::vector<int> order;
    order.reserve(static_cast<std::size_t>(n));
    NodeSet placed;
    // Repeatedly take the smallest-index node whose parents are all placed.
    for (int round = 0; round < n; ++round) {
        int pick = -1;
        for (int v = 0; v < n; ++v) {
            if (!placed.contains(v) && placed.contains_all(parents(v))) {
                pick = v;
                break;
            }
        }
        if (pick < 0) throw std::logic_error("graph has a directed cycle");
        placed.insert(pick);
        order.push_back(pick);
    }
    return order;
}

bool Dag::is_acyclic() const {
    const int n = num_nodes();
    NodeSet placed;
    bool progress = true;
    while (progress) {
        progress = false;
        for (int v = 0; v < n; ++v) {
            if (!placed.contains(v) && placed.contains_all(parents(v))) {
                placed.insert(v);
                progress = true;
            }
        }
    }
    return placed.size() == n;
}

std::vector<NodeSet> Dag::descendants() const {
    const auto order = topological_order();
    const auto ch = children();
    std::vector<NodeSet> reach(parents_.size());
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
        const auto v = static_cast<std::size_t>(*it);
        NodeSet r = ch[v];
        for (int c : ch[v].members()) r = r | reach[static_cast<std::size_t>(c)];
        reach[v] = r;
    }
    return reach;
}

bool has_directed_path(const Dag& g, int from, int to) {
    const auto ch = g.children();
    NodeSet seen;
    std::vector<int> stack{from};
    while (!stack.empty()) {
        const int v = stack.back();
        stack.pop_back();
        for (int c : ch[static_cast<std::size_t>(v)].members()) {
            if (c == to) return true;
            if (!seen.contains(c)) {
                seen.insert(c);
                stack.push_back(c);
            }
        }
    }
    return false;
}

std::vector<NodeSet> moral_neighbours(const Dag& g) {
    const int n = g.num_nodes();
    std::vector<NodeSet> nb(static_cast<std::size_t>(n));
    for (int c = 0; c < n; ++c) {
        const NodeSet pa = g.parents(c);
        for (int p : pa.members()) {
            nb[static_cast<std::size_t>(p)] = nb[static_cast<std::size_t>(p)].with(c) | pa.without(p);
            nb[static_cast<std::size_t>(c)].insert(p);
        }
    }
    return nb;
}

}  // namespace bnorder
