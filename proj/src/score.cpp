#include "bnorder/score.hpp"

#include <algorithm>
#include <stdexcept>

#include <fmt/format.h>

#include "bnorder/numeric.hpp"

namespace bnorder {

double log_family_score(const CountTable& ct, double ess) {
    const auto q = static_cast<double>(ct.num_configs());
    const int r = ct.child_arity();
    const double a_u = ess / q;
    const double a_ux = a_u / r;
    if (!(a_ux > 0.0))
        throw std::domain_error("Dirichlet hyperparameter underflowed; use a smaller family or a larger ess");
    const double lg_u = log_gamma(a_u);
    const double lg_ux = log_gamma(a_ux);
    double s = 0.0;
    for (std::int64_t u = 0; u < ct.num_configs(); ++u) {
        std::uint64_t n_u = 0;
        for (int x = 0; x < r; ++x) {
            const auto n = ct.count(u, x);
            if (n == 0) continue;
            n_u += n;
            s += log_gamma(a_ux + n) - lg_ux;
        }
        if (n_u) s += lg_u - log_gamma(a_u + static_cast<double>(n_u));
    }
    return s;
}

double log_rho(int num_vars, int family_size) {
    if (family_size < 0 || family_size > num_vars - 1)
        throw std::invalid_argument(fmt::format("family size {} invalid for {} variables", family_size, num_vars));
    return -log_binomial(num_vars - 1, family_size);
}

FamilyScorer::FamilyScorer(Dataset data, ScoreParams params) : data_(std::move(data)), params_(params) {
    if (!(params_.ess > 0.0)) throw std::invalid_argument("ess must be positive");
    if (params_.max_parents < 0) throw std::invalid_argument("max_parents must be nonnegative");
    if (data_.num_vars() > kMaxNodes)
        throw std::invalid_argument(fmt::format("at most {} variables are supported", kMaxNodes));
    params_.max_parents = std::min(params_.max_parents, data_.num_vars() - 1);
    memo_.reserve(static_cast<std::size_t>(data_.num_vars()));
    for (int i = 0; i < data_.num_vars(); ++i) memo_.push_back(std::make_unique<Memo>());
}

double FamilyScorer::compute_log_score(int child, NodeSet parents) const {
    const auto ps = parents.members();
    return log_family_score(counts(data_, child, ps), params_.ess);
}

double FamilyScorer::log_score(int child, NodeSet parents) const {
    auto& memo = *memo_[static_cast<std::size_t>(child)];
    {
        std::lock_guard lock(memo.mutex);
        if (auto it = memo.scores.find(parents.bits()); it != memo.scores.end()) return it->second;
    }
    const double s = compute_log_score(child, parents);
    std::lock_guard lock(memo.mutex);
    memo.scores.emplace(parents.bits(), s);
    return s;
}

double FamilyScorer::log_weight(const Dag& g) const {
    double s = 0.0;
    for (int i = 0; i < g.num_nodes(); ++i) s += log_weight(i, g.parents(i));
    return s;
}

}  // namespace bnorder
