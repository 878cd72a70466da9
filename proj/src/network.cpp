#include "bnorder/network.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

#include <fmt/format.h>

#include "bnorder/errors.hpp"

namespace bnorder {

GroundTruthNetwork::GroundTruthNetwork(std::vector<std::string> names, std::vector<int> arities,
                                       std::vector<std::vector<int>> parent_order,
                                       std::vector<Eigen::MatrixXd> cpts)
    : names_(std::move(names)),
      arities_(std::move(arities)),
      parent_order_(std::move(parent_order)),
      cpts_(std::move(cpts)) {
    const int n = num_vars();
    if (n == 0 || n > kMaxNodes) throw DataError(fmt::format("network must have 1..{} variables", kMaxNodes));
    if (names_.size() != arities_.size() || parent_order_.size() != arities_.size() || cpts_.size() != arities_.size())
        throw DataError("network component sizes disagree");
    dag_ = Dag(n);
    for (int i = 0; i < n; ++i) {
        const auto& ps = parent_order_[static_cast<std::size_t>(i)];
        Eigen::Index q = 1;
        for (int p : ps) {
            if (p < 0 || p >= n || p == i) throw DataError(fmt::format("bad parent id {} for {}", p, names_[i]));
            if (dag_.has_edge(p, i)) throw DataError(fmt::format("duplicate parent for {}", names_[i]));
            dag_.add_edge(p, i);
            q *= arities_[static_cast<std::size_t>(p)];
        }
        const auto& t = cpts_[static_cast<std::size_t>(i)];
        if (t.rows() != q || t.cols() != arities_[static_cast<std::size_t>(i)])
            throw DataError(fmt::format("cpt for {} is {}x{}, expected {}x{}", names_[i], t.rows(), t.cols(), q,
                                        arities_[static_cast<std::size_t>(i)]));
        if ((t.array() < 0.0).any() || !t.allFinite())
            throw DataError(fmt::format("cpt for {} has invalid probabilities", names_[i]));
        for (Eigen::Index u = 0; u < q; ++u)
            if (std::abs(t.row(u).sum() - 1.0) > 1e-9)
                throw DataError(fmt::format("cpt row {} of {} does not sum to 1", u, names_[i]));
    }
    if (!dag_.is_acyclic()) throw DataError("network structure is cyclic");
}

GroundTruthNetwork parse_network(std::istream& in) {
    std::vector<std::string> names;
    std::vector<int> arities;
    std::map<std::string, int> index;
    std::map<int, std::vector<std::string>> parent_names;
    std::map<int, std::map<long, std::vector<double>>> rows;

    auto lookup = [&](const std::string& name, int line_no) {
        auto it = index.find(name);
        if (it == index.end()) throw DataError(fmt::format("line {}: unknown variable '{}'", line_no, name));
        return it->second;
    };

    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::istringstream ls(line);
        std::string keyword;
        if (!(ls >> keyword) || keyword[0] == '#') continue;
        if (keyword == "var") {
            std::string name;
            int arity = 0;
            if (!(ls >> name >> arity) || arity < 1)
                throw DataError(fmt::format("line {}: expected 'var <name> <arity>'", line_no));
            if (index.count(name)) throw DataError(fmt::format("line {}: duplicate variable '{}'", line_no, name));
            index[name] = static_cast<int>(names.size());
            names.push_back(name);
            arities.push_back(arity);
        } else if (keyword == "parents") {
            std::string name, p;
            if (!(ls >> name)) throw DataError(fmt::format("line {}: expected 'parents <name> ...'", line_no));
            const int child = lookup(name, line_no);
            auto& list = parent_names[child];
            while (ls >> p) list.push_back(p);
        } else if (keyword == "cpt") {
            std::string name, colon;
            long u = -1;
            if (!(ls >> name >> u >> colon) || colon != ":" || u < 0)
                throw DataError(fmt::format("line {}: expected 'cpt <name> <u> : <probs>'", line_no));
            const int child = lookup(name, line_no);
            std::vector<double> probs;
            double pr = 0.0;
            while (ls >> pr) probs.push_back(pr);
            if (!ls.eof()) throw DataError(fmt::format("line {}: malformed probability", line_no));
            if (!rows[child].emplace(u, std::move(probs)).second)
                throw DataError(fmt::format("line {}: duplicate cpt row", line_no));
        } else {
            throw DataError(fmt::format("line {}: unknown keyword '{}'", line_no, keyword));
        }
    }

    const int n = static_cast<int>(names.size());
    std::vector<std::vector<int>> parent_order(static_cast<std::size_t>(n));
    std::vector<Eigen::MatrixXd> cpts(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        long q = 1;
        for (const auto& p : parent_names[i]) {
            const int pid = lookup(p, 0);
            parent_order[static_cast<std::size_t>(i)].push_back(pid);
            q *= arities[static_cast<std::size_t>(pid)];
        }
        const int r = arities[static_cast<std::size_t>(i)];
        auto& table = cpts[static_cast<std::size_t>(i)];
        table.resize(q, r);
        const auto& given = rows[i];
        if (static_cast<long>(given.size()) != q)
            throw DataError(fmt::format("variable {} has {} cpt rows, expected {}", names[i], given.size(), q));
        for (const auto& [u, probs] : given) {
            if (u >= q || static_cast<int>(probs.size()) != r)
                throw DataError(fmt::format("variable {}: cpt row {} malformed", names[i], u));
            for (int x = 0; x < r; ++x) table(u, x) = probs[static_cast<std::size_t>(x)];
        }
    }
    return GroundTruthNetwork(std::move(names), std::move(arities), std::move(parent_order), std::move(cpts));
}

GroundTruthNetwork load_network(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw DataError(fmt::format("cannot open {}", path.string()));
    return parse_network(in);
}

void write_network(std::ostream& out, const GroundTruthNetwork& net) {
    const int n = net.num_vars();
    for (int i = 0; i < n; ++i) out << "var " << net.names()[i] << ' ' << net.arities()[i] << '\n';
    for (int i = 0; i < n; ++i) {
        if (net.parent_order(i).empty()) continue;
        out << "parents " << net.names()[i];
        for (int p : net.parent_order(i)) out << ' ' << net.names()[static_cast<std::size_t>(p)];
        out << '\n';
    }
    for (int i = 0; i < n; ++i) {
        const auto& t = net.cpt(i);
        for (Eigen::Index u = 0; u < t.rows(); ++u) {
            out << "cpt " << net.names()[i] << ' ' << u << " :";
            for (Eigen::Index x = 0; x < t.cols(); ++x) out << ' ' << fmt::format("{:.17g}", t(u, x));
            out << '\n';
        }
    }
}

Dataset forward_sample(const GroundTruthNetwork& net, int rows, std::uint64_t seed) {
    if (rows < 1) throw DataError("need at least one row");
    const int n = net.num_vars();
    const auto order = net.dag().topological_order();
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    DataMatrix values(rows, n);
    for (int m = 0; m < rows; ++m) {
        for (int i : order) {
            Eigen::Index u = 0, stride = 1;
            for (int p : net.parent_order(i)) {
                u += stride * values(m, p);
                stride *= net.arities()[static_cast<std::size_t>(p)];
            }
            const auto row = net.cpt(i).row(u);
            const double draw = unif(rng);
            double acc = 0.0;
            int x = static_cast<int>(row.size()) - 1;
            for (Eigen::Index v = 0; v < row.size(); ++v) {
                acc += row(v);
                if (draw < acc) {
                    x = static_cast<int>(v);
                    break;
                }
            }
            // Rounding can leave `draw` above the cumulative sum; never land on a zero-probability value.
            while (row(x) == 0.0 && x > 0) --x;
            values(m, i) = x;
        }
    }
    return Dataset(net.names(), net.arities(), std::move(values));
}

GroundTruthNetwork random_network(const RandomNetworkSpec& spec, std::uint64_t seed) {
    const int n = spec.num_vars;
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> arity_dist(spec.min_arity, spec.max_arity);
    std::bernoulli_distribution edge(spec.edge_probability);
    std::gamma_distribution<double> gamma(spec.concentration, 1.0);

    std::vector<std::string> names;
    std::vector<int> arities;
    for (int i = 0; i < n; ++i) {
        names.push_back(fmt::format("X{}", i));
        arities.push_back(arity_dist(rng));
    }
    std::vector<std::vector<int>> parent_order(static_cast<std::size_t>(n));
    std::vector<Eigen::MatrixXd> cpts(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        std::vector<int> earlier(static_cast<std::size_t>(i));
        for (int j = 0; j < i; ++j) earlier[static_cast<std::size_t>(j)] = j;
        std::shuffle(earlier.begin(), earlier.end(), rng);
        auto& ps = parent_order[static_cast<std::size_t>(i)];
        for (int j : earlier) {
            if (static_cast<int>(ps.size()) >= spec.max_parents) break;
            if (edge(rng)) ps.push_back(j);
        }
        std::sort(ps.begin(), ps.end());
        Eigen::Index q = 1;
        for (int p : ps) q *= arities[static_cast<std::size_t>(p)];
        const int r = arities[static_cast<std::size_t>(i)];
        Eigen::MatrixXd t(q, r);
        for (Eigen::Index u = 0; u < q; ++u) {
            double s = 0.0;
            for (int x = 0; x < r; ++x) s += t(u, x) = std::max(gamma(rng), 1e-300);
            t.row(u) /= s;
        }
        cpts[static_cast<std::size_t>(i)] = std::move(t);
    }
    return GroundTruthNetwork(std::move(names), std::move(arities), std::move(parent_order), std::move(cpts));
}

}  // namespace bnorder
