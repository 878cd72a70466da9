#pragma once

#include <vector>

#include "bnorder/node_set.hpp"

namespace bnorder {

/// Directed graph stored as one parent set per node.
///
/// Acyclicity and the indegree bound are not enforced by the mutators; callers
/// that need them check `is_acyclic()` / `max_indegree()` or use the move
/// generators in structure_mcmc, which only produce legal graphs.
class Dag {
public:
    Dag() = default;
    explicit Dag(int n) : parents_(static_cast<std::size_t>(n)) {}
    explicit Dag(std::vector<NodeSet> parents) : parents_(std::move(parents)) {}

    int num_nodes() const { return static_cast<int>(parents_.size()); }
    NodeSet parents(int child) const { return parents_[static_cast<std::size_t>(child)]; }
    void set_parents(int child, NodeSet ps) { parents_[static_cast<std::size_t>(child)] = ps; }
    bool has_edge(int from, int to) const { return parents(to).contains(from); }
    void add_edge(int from, int to) { parents_[static_cast<std::size_t>(to)].insert(from); }
    void remove_edge(int from, int to) { parents_[static_cast<std::size_t>(to)].erase(from); }
    int num_edges() const;
    int max_indegree() const;

    /// children[i] = { j : i -> j }
    std::vector<NodeSet> children() const;
    /// reach[i] = nodes reachable from i by a directed path of length >= 1.
    /// Only meaningful for acyclic graphs.
    std::vector<NodeSet> descendants() const;
    bool is_acyclic() const;
    /// Throws std::logic_error on a cycle.
    std::vector<int> topological_order() const;

    friend bool operator==(const Dag&, const Dag&) = default;

private:
    std::vector<NodeSet> parents_;
};

/// True iff `to` is reachable from `from` through at least one edge.
bool has_directed_path(const Dag& g, int from, int to);

/// Markov blanket adjacency: parent, child or co-parent of a common child.
std::vector<NodeSet> moral_neighbours(const Dag& g);

}  // namespace bnorder
