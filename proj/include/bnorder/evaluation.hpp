#pragma once

#include <iosfwd>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "bnorder/features.hpp"
#include "bnorder/network.hpp"

namespace bnorder {

/// 0/1 ground truth from the generating network: edges, moral-graph
/// adjacency (markov), or directed reachability (path).
Eigen::MatrixXd label_features(const GroundTruthNetwork& net, FeatureKind kind);

struct TradeoffPoint {
    double threshold = 0.0;
    int false_positives = 0;
    int false_negatives = 0;
};

/// 101 evenly spaced thresholds in [0, 1].
std::vector<double> default_thresholds();

/// A feature is predicted present when its estimate is strictly above t.
/// FP = negatives predicted present, FN = positives not predicted.
/// Throws DataError when the label matrix does not match the table.
std::vector<TradeoffPoint> tradeoff_curve(const FeaturePosteriorTable& estimates, const Eigen::MatrixXd& labels,
                                          std::span<const double> thresholds);

/// CSV `threshold,false_positives,false_negatives`.
void write_curve_csv(std::ostream& out, std::span<const TradeoffPoint> curve);

}  // namespace bnorder
