#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "bnorder/dag.hpp"

namespace bnorder {

enum class FeatureKind { edge, markov, path };

std::string_view to_string(FeatureKind kind);
/// Throws std::invalid_argument for anything but edge|markov|path.
FeatureKind parse_feature_kind(std::string_view text);

/// Posterior (or confidence) estimates for every feature of one kind.
///
/// estimates(i, j): edge i -> j, path i ~> j, or markov {i, j} (symmetric).
/// The diagonal is always 0.
struct FeaturePosteriorTable {
    FeatureKind kind = FeatureKind::edge;
    std::vector<std::string> names;
    Eigen::MatrixXd estimates;
    std::size_t n_samples = 0;
    std::uint64_t config_hash = 0;

    int num_vars() const { return static_cast<int>(names.size()); }
};

/// The (i, j) pairs a kind ranges over: ordered pairs for edge/path,
/// i < j for markov. Row-major ascending.
std::vector<std::pair<int, int>> feature_pairs(FeatureKind kind, int num_vars);

/// 0/1 matrix of the features present in g.
Eigen::MatrixXd feature_indicators(const Dag& g, FeatureKind kind);

/// CSV `kind,i,j,estimate` with variable names for i and j.
void write_feature_csv(std::ostream& out, const FeaturePosteriorTable& table);
/// Reads a feature CSV against a known variable list. Throws DataError on
/// unknown names, mixed kinds, or a feature set that does not cover `names`.
FeaturePosteriorTable read_feature_csv(std::istream& in, const std::vector<std::string>& names);

/// FNV-1a, for tagging tables with the configuration that produced them.
std::uint64_t fnv1a(std::string_view text);

}  // namespace bnorder
