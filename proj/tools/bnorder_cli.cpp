// bnorder: command-line front end for the structure-discovery toolkit.

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "bnorder/errors.hpp"
#include "bnorder/evaluation.hpp"
#include "bnorder/exact.hpp"
#include "bnorder/order_mcmc.hpp"
#include "bnorder/search.hpp"
#include "bnorder/structure_mcmc.hpp"

using namespace bnorder;
namespace fs = std::filesystem;

namespace {

enum Exit { ok = 0, usage = 1, data = 2, cap = 3 };

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ModelFlags {
    std::string data;
    int k = 3;
    double ess = 1.0;
    int mp = 20;
    std::size_t mf = 4000;
    std::string gamma_bits = "10";
    bool no_prune = false;
    int jobs = 1;
    std::uint64_t seed = 0;
    std::string features = "markov";
    std::string out;

    void attach(CLI::App* app, bool cache_flags = true) {
        app->add_option("--data", data, "Training data CSV")->required();
        app->add_option("--k", k, "Maximum number of parents")->capture_default_str();
        app->add_option("--ess", ess, "BDeu equivalent sample size")->capture_default_str();
        if (cache_flags) {
            app->add_option("--mp", mp, "Candidate parents per node")->capture_default_str();
            app->add_option("--mf", mf, "Cached families per node")->capture_default_str();
            app->add_option("--gamma-bits", gamma_bits, "Fallback margin in bits, or inf")->capture_default_str();
            app->add_flag("--no-prune", no_prune, "Enumerate families without incremental-value pruning");
        }
        app->add_option("--jobs", jobs, "Worker threads")->capture_default_str();
        app->add_option("--seed", seed, "Master random seed")->capture_default_str();
        app->add_option("--features", features, "edge | markov | path")
            ->check(CLI::IsMember({"edge", "markov", "path"}))
            ->capture_default_str();
        app->add_option("--out", out, "Output CSV (stdout when absent)");
    }

    ScoreParams score() const { return {ess, k}; }

    CacheOptions cache() const {
        CacheOptions o;
        o.max_candidates = mp;
        o.max_families = mf;
        o.prune = !no_prune;
        std::size_t used = 0;
        try {
            o.gamma_bits = std::stod(gamma_bits, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used != gamma_bits.size() || !(o.gamma_bits > 0.0))
            throw UsageError(fmt::format("--gamma-bits: expected a positive number or inf, got '{}'", gamma_bits));
        return o;
    }
};

std::uint64_t derived_seed(std::uint64_t seed, std::uint32_t stream) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32), stream};
    std::uint32_t words[2];
    seq.generate(words, words + 2);
    return (std::uint64_t{words[1]} << 32) | words[0];
}

// Writes through a buffer so a failed run never leaves a partial file.
void emit(const std::string& path, const std::string& text) {
    if (path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f || !(f << text)) throw DataError(fmt::format("cannot write {}", path));
}

std::string features_csv(const FeaturePosteriorTable& t) {
    std::ostringstream s;
    write_feature_csv(s, t);
    return s.str();
}

Dag greedy_seed(const FamilyCache& cache, std::uint64_t seed) {
    std::mt19937_64 rng(derived_seed(seed, 2));
    return greedy_hill_climb(cache, Dag(cache.num_vars()), 1, rng);
}

struct GenData {
    std::string net;
    int random_vars = 0;
    int max_parents = 2;
    int arity = 2;
    std::string net_out;
    int rows = 0;
    std::uint64_t seed = 0;
    std::string out;
    bool force = false;

    void attach(CLI::App* app) {
        auto* src = app->add_option("--net", net, "Network file to sample from");
        auto* rnd = app->add_option("--random", random_vars, "Sample from a random network with this many variables");
        src->excludes(rnd);
        app->add_option("--max-parents", max_parents, "Random network: parents per node")->capture_default_str();
        app->add_option("--arity", arity, "Random network: states per variable")->capture_default_str();
        app->add_option("--net-out", net_out, "Random network: also write the network here");
        app->add_option("--rows", rows, "Number of rows")->required();
        app->add_option("--seed", seed, "Random seed")->capture_default_str();
        app->add_option("--out", out, "Output CSV")->required();
        app->add_flag("--force", force, "Overwrite existing files");
    }

    int run() const {
        if (net.empty() == (random_vars == 0)) throw UsageError("give exactly one of --net or --random");
        if (rows < 0) throw UsageError("--rows must be nonnegative");
        for (const auto& p : {out, net_out})
            if (!p.empty() && !force && fs::exists(p))
                throw UsageError(fmt::format("{} exists; pass --force to overwrite", p));
        std::optional<GroundTruthNetwork> model;
        if (!net.empty()) {
            model = load_network(net);
        } else {
            RandomNetworkSpec spec;
            spec.num_vars = random_vars;
            spec.max_parents = max_parents;
            spec.min_arity = spec.max_arity = arity;
            model = random_network(spec, derived_seed(seed, 1));
            if (!net_out.empty()) {
                std::ostringstream s;
                write_network(s, *model);
                emit(net_out, s.str());
            }
        }
        std::ostringstream s;
        write_csv(s, forward_sample(*model, rows, seed));
        emit(out, s.str());
        return ok;
    }
};

struct OrderRun {
    ModelFlags model;
    OrderMcmcConfig chain;
    std::string init = "random";
    std::string trace;

    void attach(CLI::App* app) {
        model.attach(app);
        app->add_option("--pflip", chain.p_flip, "Probability of a flip proposal")->capture_default_str();
        app->add_option("--burnin", chain.burn_in, "Burn-in iterations")->capture_default_str();
        app->add_option("--thin", chain.thin, "Iterations between samples")->capture_default_str();
        app->add_option("--samples", chain.n_samples, "Retained orderings")->capture_default_str();
        app->add_option("--dags-per-order", chain.dags_per_order, "Sampled DAGs per ordering for path features")
            ->capture_default_str();
        app->add_option("--init", init, "random | greedy")
            ->check(CLI::IsMember({"random", "greedy"}))
            ->capture_default_str();
        app->add_option("--trace", trace, "Write the score trace here");
        app->add_flag("--paranoid", chain.paranoid, "Check every accepted flip against a full recomputation");
    }

    int run() {
        const auto cache = build_family_cache(load_csv(model.data), model.score(), model.cache(), model.jobs);
        chain.seed = model.seed;
        if (init == "greedy") {
            chain.initial = Ordering(greedy_seed(cache, model.seed).topological_order());
        }
        const auto result = run_chain(cache, chain);
        auto table = estimate_features(result.samples, cache, parse_feature_kind(model.features),
                                       chain.dags_per_order, derived_seed(model.seed, 3));
        if (!trace.empty()) {
            std::ostringstream s;
            write_trace(s, result.trace);
            emit(trace, s.str());
        }
        emit(model.out, features_csv(table));
        return ok;
    }
};

struct StructureRun {
    ModelFlags model;
    StructureMcmcConfig chain;
    std::string init = "empty";
    std::string trace;

    void attach(CLI::App* app) {
        model.attach(app);
        app->add_option("--burnin", chain.burn_in, "Burn-in iterations")->capture_default_str();
        app->add_option("--thin", chain.thin, "Iterations between samples")->capture_default_str();
        app->add_option("--samples", chain.n_samples, "Retained graphs")->capture_default_str();
        app->add_option("--init", init, "empty | greedy")
            ->check(CLI::IsMember({"empty", "greedy"}))
            ->capture_default_str();
        app->add_option("--trace", trace, "Write the score trace here");
    }

    int run() {
        const auto cache = build_family_cache(load_csv(model.data), model.score(), model.cache(), model.jobs);
        chain.seed = model.seed;
        if (init == "greedy") chain.initial = greedy_seed(cache, model.seed);
        const auto result = run_structure_chain(cache, chain);
        const auto table = dag_feature_frequencies(result.samples, cache.scorer().data().names(),
                                                   parse_feature_kind(model.features));
        if (!trace.empty()) {
            std::ostringstream s;
            write_trace(s, result.trace);
            emit(trace, s.str());
        }
        emit(model.out, features_csv(table));
        return ok;
    }
};

struct ExactRun {
    ModelFlags model;
    std::string mode = "orders";
    int dags_per_order = 2000;

    void attach(CLI::App* app) {
        model.attach(app, false);
        app->add_option("--mode", mode, "dags | orders")->check(CLI::IsMember({"dags", "orders"}))->capture_default_str();
        app->add_option("--dags-per-order", dags_per_order, "Sampled DAGs per ordering for paths above 5 variables")
            ->capture_default_str();
    }

    int run() {
        auto d = load_csv(model.data);
        const auto kind = parse_feature_kind(model.features);
        FeaturePosteriorTable t;
        t.kind = kind;
        t.names = d.names();
        if (mode == "dags") {
            const FamilyScorer scorer(std::move(d), model.score());
            t.estimates = exact_feature_table_dags(scorer, kind);
        } else {
            const int n = d.num_vars();
            if (n > kMaxOrderEnumerationVars)
                throw CapExceeded(fmt::format("ordering enumeration is limited to {} variables, dataset has {}",
                                              kMaxOrderEnumerationVars, n));
            const auto cache = build_family_cache(std::move(d), model.score(), CacheOptions::exhaustive(n), model.jobs);
            t.estimates = exact_feature_table_orders(cache, kind, dags_per_order, model.seed);
        }
        emit(model.out, features_csv(t));
        return ok;
    }
};

struct BootstrapRun {
    ModelFlags model;
    BootstrapConfig boot;

    void attach(CLI::App* app) {
        model.attach(app, false);
        app->add_option("--B", boot.replicates, "Bootstrap replicates")->capture_default_str();
        app->add_option("--mp", boot.max_candidates, "Candidate parents per node")->capture_default_str();
        app->add_option("--restarts", boot.restarts, "Greedy climbs per replicate")->capture_default_str();
    }

    int run() {
        boot.seed = model.seed;
        boot.jobs = model.jobs;
        const auto t = bootstrap_confidence(load_csv(model.data), model.score(), boot, parse_feature_kind(model.features));
        emit(model.out, features_csv(t));
        return ok;
    }
};

struct EvalRun {
    std::string estimates;
    std::string truth;
    std::string out;

    void attach(CLI::App* app) {
        app->add_option("--estimates", estimates, "Feature CSV")->required();
        app->add_option("--truth-net", truth, "Generating network")->required();
        app->add_option("--out", out, "Curve CSV (stdout when absent)");
    }

    int run() const {
        const auto net = load_network(truth);
        std::ifstream in(estimates);
        if (!in) throw DataError(fmt::format("cannot open {}", estimates));
        const auto table = read_feature_csv(in, net.names());
        const auto curve = tradeoff_curve(table, label_features(net, table.kind), default_thresholds());
        std::ostringstream s;
        write_curve_csv(s, curve);
        emit(out, s.str());
        return ok;
    }
};

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Bayesian network structure discovery by MCMC over orderings"};
    app.require_subcommand(1);

    GenData gen;
    OrderRun order;
    StructureRun structure;
    ExactRun exact;
    BootstrapRun boot;
    EvalRun eval;
    gen.attach(app.add_subcommand("gen-data", "Sample a data set from a network"));
    order.attach(app.add_subcommand("order-mcmc", "Feature posteriors by MCMC over orderings"));
    structure.attach(app.add_subcommand("structure-mcmc", "Feature frequencies by MCMC over DAGs"));
    exact.attach(app.add_subcommand("exact", "Exact feature posteriors for small problems"));
    boot.attach(app.add_subcommand("bootstrap", "Bootstrap confidence from greedy search"));
    eval.attach(app.add_subcommand("eval", "FP/FN tradeoff curve against a known network"));

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return usage;
    }

    try {
        if (app.got_subcommand("gen-data")) return gen.run();
        if (app.got_subcommand("order-mcmc")) return order.run();
        if (app.got_subcommand("structure-mcmc")) return structure.run();
        if (app.got_subcommand("exact")) return exact.run();
        if (app.got_subcommand("bootstrap")) return boot.run();
        return eval.run();
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return usage;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return usage;
    } catch (const CapExceeded& e) {
        std::cerr << "refused: " << e.what() << '\n';
        return cap;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return data;
    }
}
