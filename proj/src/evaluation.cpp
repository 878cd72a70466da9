#include "bnorder/evaluation.hpp"

#include <ostream>

#include <fmt/format.h>

#include "bnorder/errors.hpp"

namespace bnorder {

Eigen::MatrixXd label_features(const GroundTruthNetwork& net, FeatureKind kind) {
    return feature_indicators(net.dag(), kind);
}

std::vector<double> default_thresholds() {
    std::vector<double> t(101);
    for (int i = 0; i <= 100; ++i) t[static_cast<std::size_t>(i)] = i / 100.0;
    return t;
}

std::vector<TradeoffPoint> tradeoff_curve(const FeaturePosteriorTable& estimates, const Eigen::MatrixXd& labels,
                                          std::span<const double> thresholds) {
    const int n = estimates.num_vars();
    if (labels.rows() != n || labels.cols() != n || estimates.estimates.rows() != n || estimates.estimates.cols() != n)
        throw DataError(fmt::format("label matrix is {}x{} but the estimates cover {} variables", labels.rows(),
                                    labels.cols(), n));
    const auto pairs = feature_pairs(estimates.kind, n);
    std::vector<TradeoffPoint> curve;
    curve.reserve(thresholds.size());
    for (double t : thresholds) {
        TradeoffPoint p{t, 0, 0};
        for (auto [i, j] : pairs) {
            const bool predicted = estimates.estimates(i, j) > t;
            const bool positive = labels(i, j) > 0.5;
            if (predicted && !positive) ++p.false_positives;
            if (!predicted && positive) ++p.false_negatives;
        }
        curve.push_back(p);
    }
    return curve;
}

void write_curve_csv(std::ostream& out, std::span<const TradeoffPoint> curve) {
    out << "threshold,false_positives,false_negatives\n";
    for (const auto& p : curve) out << fmt::format("{:.2f},{},{}\n", p.threshold, p.false_positives, p.false_negatives);
}

}  // namespace bnorder
