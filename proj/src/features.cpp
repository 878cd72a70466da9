#include "bnorder/features.hpp"

#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include <fmt/format.h>

#include "bnorder/errors.hpp"

namespace bnorder {

std::string_view to_string(FeatureKind kind) {
    switch (kind) {
        case FeatureKind::edge: return "edge";
        case FeatureKind::markov: return "markov";
        case FeatureKind::path: return "path";
    }
    return "?";
}

FeatureKind parse_feature_kind(std::string_view text) {
    if (text == "edge") return FeatureKind::edge;
    if (text == "markov") return FeatureKind::markov;
    if (text == "path") return FeatureKind::path;
    throw std::invalid_argument(fmt::format("unknown feature kind '{}'", text));
}

std::vector<std::pair<int, int>> feature_pairs(FeatureKind kind, int n) {
    std::vector<std::pair<int, int>> out;
    for (int i = 0; i < n; ++i)
        for (int j = kind == FeatureKind::markov ? i + 1 : 0; j < n; ++j)
            if (i != j) out.emplace_back(i, j);
    return out;
}

Eigen::MatrixXd feature_indicators(const Dag& g, FeatureKind kind) {
    const int n = g.num_nodes();
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
    switch (kind) {
        case FeatureKind::edge:
            for (int j = 0; j < n; ++j)
                for (int i : g.parents(j).members()) m(i, j) = 1.0;
            break;
        case FeatureKind::markov: {
            const auto nb = moral_neighbours(g);
            for (int i = 0; i < n; ++i)
                for (int j : nb[static_cast<std::size_t>(i)].members()) m(i, j) = 1.0;
            break;
        }
        case FeatureKind::path: {
            const auto reach = g.descendants();
            for (int i = 0; i < n; ++i)
                for (int j : reach[static_cast<std::size_t>(i)].members()) m(i, j) = 1.0;
            break;
        }
    }
    return m;
}

void write_feature_csv(std::ostream& out, const FeaturePosteriorTable& table) {
    out << "kind,i,j,estimate\n";
    const auto kind = to_string(table.kind);
    for (auto [i, j] : feature_pairs(table.kind, table.num_vars()))
        out << fmt::format("{},{},{},{:.6f}\n", kind, table.names[static_cast<std::size_t>(i)],
                           table.names[static_cast<std::size_t>(j)], table.estimates(i, j));
}

FeaturePosteriorTable read_feature_csv(std::istream& in, const std::vector<std::string>& names) {
    std::map<std::string, int> index;
    for (std::size_t i = 0; i < names.size(); ++i) index[names[i]] = static_cast<int>(i);
    const int n = static_cast<int>(names.size());

    FeaturePosteriorTable t;
    t.names = names;
    t.estimates = Eigen::MatrixXd::Zero(n, n);
    Eigen::MatrixXi seen = Eigen::MatrixXi::Zero(n, n);
    bool have_kind = false;

    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || (line_no == 1 && line.rfind("kind,", 0) == 0)) continue;
        std::istringstream ls(line);
        std::string kind, a, b, est;
        if (!std::getline(ls, kind, ',') || !std::getline(ls, a, ',') || !std::getline(ls, b, ',') ||
            !std::getline(ls, est))
            throw DataError(fmt::format("feature CSV line {}: expected kind,i,j,estimate", line_no));
        FeatureKind k;
        try {
            k = parse_feature_kind(kind);
        } catch (const std::invalid_argument& e) {
            throw DataError(fmt::format("feature CSV line {}: {}", line_no, e.what()));
        }
        if (have_kind && k != t.kind) throw DataError("feature CSV mixes feature kinds");
        t.kind = k;
        have_kind = true;
        const auto ia = index.find(a), ib = index.find(b);
        if (ia == index.end() || ib == index.end())
            throw DataError(fmt::format("feature CSV line {}: variable not in the network", line_no));
        double v = 0.0;
        try {
            std::size_t used = 0;
            v = std::stod(est, &used);
            if (used != est.size()) throw std::invalid_argument(est);
        } catch (const std::exception&) {
            throw DataError(fmt::format("feature CSV line {}: bad estimate '{}'", line_no, est));
        }
        if (!(v >= 0.0 && v <= 1.0)) throw DataError(fmt::format("feature CSV line {}: estimate outside [0,1]", line_no));
        int i = ia->second, j = ib->second;
        if (i == j) throw DataError(fmt::format("feature CSV line {}: self feature", line_no));
        if (k == FeatureKind::markov && i > j) std::swap(i, j);
        t.estimates(i, j) = v;
        seen(i, j) += 1;
        if (k == FeatureKind::markov) t.estimates(j, i) = v;
    }
    if (!have_kind) throw DataError("feature CSV has no rows");
    for (auto [i, j] : feature_pairs(t.kind, n))
        if (seen(i, j) != 1)
            throw DataError(fmt::format("feature CSV does not cover the variable set exactly ({} - {})",
                                        names[static_cast<std::size_t>(i)], names[static_cast<std::size_t>(j)]));
    return t;
}

std::uint64_t fnv1a(std::string_view text) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : text) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

}  // namespace bnorder
