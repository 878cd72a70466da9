#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "bnorder/dag.hpp"
#include "bnorder/dataset.hpp"

namespace bnorder {

/// A discrete Bayesian network with explicit conditional probability tables.
///
/// cpt(i) has one row per parent configuration (mixed radix over
/// parent_order(i), first parent least significant) and one column per value.
class GroundTruthNetwork {
public:
    /// Throws DataError when rows do not sum to 1 within 1e-9, shapes are
    /// inconsistent, or the parent structure is cyclic.
    GroundTruthNetwork(std::vector<std::string> names, std::vector<int> arities,
                       std::vector<std::vector<int>> parent_order, std::vector<Eigen::MatrixXd> cpts);

    int num_vars() const { return static_cast<int>(arities_.size()); }
    const std::vector<std::string>& names() const { return names_; }
    const std::vector<int>& arities() const { return arities_; }
    const std::vector<int>& parent_order(int i) const { return parent_order_[static_cast<std::size_t>(i)]; }
    const Eigen::MatrixXd& cpt(int i) const { return cpts_[static_cast<std::size_t>(i)]; }
    const Dag& dag() const { return dag_; }

private:
    std::vector<std::string> names_;
    std::vector<int> arities_;
    std::vector<std::vector<int>> parent_order_;
    std::vector<Eigen::MatrixXd> cpts_;
    Dag dag_;
};

/// Line format:
///   var <name> <arity>
///   parents <name> <p1> <p2> ...
///   cpt <name> <u> : <p_0> ... <p_{r-1}>
/// Blank lines and lines starting with '#' are ignored.
GroundTruthNetwork parse_network(std::istream& in);
GroundTruthNetwork load_network(const std::filesystem::path& path);
void write_network(std::ostream& out, const GroundTruthNetwork& net);

/// Ancestral sampling in topological order; deterministic given seed.
Dataset forward_sample(const GroundTruthNetwork& net, int rows, std::uint64_t seed);

/// Random network for synthetic experiments.
///
/// Nodes are placed in index order; each node draws up to `max_parents`
/// parents among earlier nodes (ancestral edges only, so node index is a
/// topological order). CPT rows are Dirichlet(concentration) draws, so small
/// concentrations give strong, near-deterministic dependencies.
struct RandomNetworkSpec {
    int num_vars = 8;
    int max_parents = 2;
    int min_arity = 2;
    int max_arity = 2;
    double edge_probability = 0.5;
    double concentration = 0.5;
};
GroundTruthNetwork random_network(const RandomNetworkSpec& spec, std::uint64_t seed);

}  // namespace bnorder
