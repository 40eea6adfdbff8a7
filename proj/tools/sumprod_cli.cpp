// sumprod: command-line front end.
// Exit codes: 0 pass, 1 invariant failure, 2 usage error, 3 budget exceeded.

#include "sumprod/bounds.hpp"
#include "sumprod/errors.hpp"
#include "sumprod/harness.hpp"
#include "sumprod/lambda_q.hpp"
#include "sumprod/regularize.hpp"
#include "sumprod/serialize.hpp"
#include "sumprod/setops.hpp"

#include "CLI11.hpp"

#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

using namespace sumprod;

namespace {

struct Globals {
    std::uint64_t seed = 0;
    std::string config;
    std::string csv;
    bool json = false;
    std::size_t budget = kDefaultBudget;
    std::string scale = "small";
};

struct Input {
    std::string set;
    std::string family;
};

// Additive commands take any integers; product commands need positive ones.
IntSet read_input(const Input& in, std::uint64_t seed, bool positive) {
    if (!in.family.empty() && !in.set.empty()) throw InvalidSpec("give --set or --family, not both");
    if (!in.family.empty()) return generate_family(parse_family(in.family, seed));
    if (!in.set.empty()) {
        const auto spec = parse_family("explicit:" + in.set);
        if (positive) return generate_family(spec);
        IntSet a(spec.values);
        if (a.empty()) throw InvalidSpec("empty set");
        if (a.size() != spec.values.size()) throw InvalidSpec("set has repeated elements");
        return a;
    }
    throw InvalidSpec("an input set is required (--set or --family)");
}

std::ofstream open_csv(const std::string& path) {
    std::ofstream os(path);
    if (!os) throw InvalidSpec("cannot write " + path);
    return os;
}

void emit(const Globals& g, const Json& j) {
    if (g.json || g.csv.empty()) std::cout << j.dump(2) << '\n';
}

void add_input(CLI::App* sub, Input& in) {
    sub->add_option("--set", in.set, "comma-separated integers");
    sub->add_option("--family", in.family, "ap:s,d,n | gp:b,n | grid:2^3,3^3 | random:n,width | explicit:...");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"sum-product toolkit"};
    app.require_subcommand(1);
    Globals g;
    app.add_option("--seed", g.seed, "master seed")->capture_default_str();
    app.add_option("--config", g.config, "key = value constants file");
    app.add_option("--csv", g.csv, "write the table of the subcommand to this path");
    app.add_flag("--json", g.json, "print JSON even when --csv is given");
    app.add_option("--budget", g.budget, "max elements per k-fold stage")->capture_default_str();
    app.add_option("--scale", g.scale, "tiny, small or full")
        ->check(CLI::IsMember({"tiny", "small", "full"}))
        ->capture_default_str();
    app.fallthrough();

    // factor
    auto* factor = app.add_subcommand("factor", "exponent vectors over the joint prime basis");
    std::vector<std::uint64_t> factor_values;
    factor->add_option("values", factor_values, "positive integers")->required();

    // sumset / prodset / energy
    Input sum_in, prod_in, energy_in, lambda_in;
    int sum_k = 2, prod_k = 2, energy_h = 2;
    auto* sum = app.add_subcommand("sumset", "k-fold sumset kA");
    add_input(sum, sum_in);
    sum->add_option("-k", sum_k, "number of summands")->capture_default_str();
    auto* prod = app.add_subcommand("prodset", "k-fold product set A^(k)");
    add_input(prod, prod_in);
    prod->add_option("-k", prod_k, "number of factors")->capture_default_str();
    auto* energy = app.add_subcommand("energy", "E_h(A) and |hA| >= N^{2h}/E_h(A)");
    add_input(energy, energy_in);
    energy->add_option("--order", energy_h, "h")->capture_default_str();

    // lambda
    auto* lam = app.add_subcommand("lambda", "certified lower bound for Lambda_q(A)");
    add_input(lam, lambda_in);
    double lam_q = 4;
    int lam_restarts = 32, lam_iters = 500;
    lam->add_option("--q", lam_q, "moment")->capture_default_str();
    lam->add_option("--restarts", lam_restarts)->capture_default_str();
    lam->add_option("--iters", lam_iters)->capture_default_str();

    // regularize
    auto* reg = app.add_subcommand("regularize", "Steps 1-7 on a random instance, with audit");
    std::size_t reg_n = 128, reg_primes = 4;
    std::string reg_delta = "3/10";
    reg->add_option("--n", reg_n, "elements per side")->capture_default_str();
    reg->add_option("--primes", reg_primes, "basis size")->capture_default_str();
    reg->add_option("--delta", reg_delta, "density, as a rational")->capture_default_str();

    // bounds
    auto* bnd = app.add_subcommand("bounds", "evaluate admissible pairs, Lambda, k(b), chains");
    std::string pair_name = "base";
    double bN = 1e6, bdelta = 0.5, bK = 4, bgamma = 0.25, btau = 0.25;
    std::optional<int> bb;
    std::vector<std::uint64_t> chain;
    bnd->add_option("--pair", pair_name, "base, lemma43, lemma51 or transform")
        ->check(CLI::IsMember({"base", "lemma43", "lemma51", "transform"}))
        ->capture_default_str();
    bnd->add_option("--N", bN)->capture_default_str();
    bnd->add_option("--delta", bdelta)->capture_default_str();
    bnd->add_option("--K", bK)->capture_default_str();
    bnd->add_option("--gamma", bgamma)->capture_default_str();
    bnd->add_option("--tau", btau)->capture_default_str();
    bnd->add_option("--b", bb, "also report k(b)");
    bnd->add_option("--chain", chain, "sizes |2^j A|, j = 0..l");

    // experiment
    auto* exp = app.add_subcommand("experiment", "growth of |kA| and |A^(k)|");
    std::string exp_family;
    std::optional<int> exp_kmax;
    double exp_subset = 0;
    std::string exp_exponent_csv;
    std::optional<int> exp_driver_b;
    exp->add_option("--family", exp_family)->required();
    exp->add_option("--kmax", exp_kmax, "largest k (default by scale: 2, 4, 8)");
    exp->add_option("--subset-delta", exp_subset, "also track a random A1 with |A1| = N^delta");
    exp->add_option("--exponent-csv", exp_exponent_csv, "k,sum_exponent,product_exponent table");
    exp->add_option("--driver", exp_driver_b, "run the doubling-chain driver with this b");

    // verify
    auto* ver = app.add_subcommand("verify", "module invariant suite");
    bool tamper = false;
    ver->add_flag("--tamper", tamper, "negate the Parseval oracle (must fail)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        BoundsConfig cfg;
        if (!g.config.empty()) cfg = load_config(g.config);
        const Scale scale = parse_scale(g.scale);

        if (factor->parsed()) {
            const auto emb = embed_set(factor_values);
            Json el = Json::array();
            for (auto v : factor_values) el.push_back({{"value", v}, {"exponents", factorize(v, emb.basis)}});
            emit(g, {{"basis", emb.basis.primes()}, {"elements", el}});
            return 0;
        }
        if (sum->parsed()) {
            const auto a = read_input(sum_in, g.seed, false);
            const auto s = iterated_sumset(a, sum_k, g.budget);
            Json j = {{"N", a.size()}, {"k", sum_k}, {"size", s.size()}};
            if (s.size() <= 1000) j["elements"] = to_json(s);
            if (!g.csv.empty()) {
                auto os = open_csv(g.csv);
                write_counts_csv(os, representation_counts(a, sum_k));
            }
            emit(g, j);
            return 0;
        }
        if (prod->parsed()) {
            const auto a = read_input(prod_in, g.seed, true);
            const auto p = product_set(a, prod_k, g.budget);
            Json j = {{"N", a.size()}, {"k", prod_k}, {"size", p.size()}, {"basis", p.basis.primes()}};
            if (p.size() <= 1000) {
                Json vals = Json::array();
                for (const auto& v : p.values()) vals.push_back(v.str());
                j["elements"] = vals;
            }
            if (!g.csv.empty()) {
                auto os = open_csv(g.csv);
                std::vector<GrowthRow> rows;
                for (int k = 1; k <= prod_k; ++k)
                    rows.push_back({k, iterated_sumset(a, k, g.budget).size(), product_set(a, k, g.budget).size()});
                write_growth_csv(os, rows);
            }
            emit(g, j);
            return 0;
        }
        if (energy->parsed()) {
            const auto a = read_input(energy_in, g.seed, false);
            const auto eb = energy_sumset_bound(a, energy_h);
            if (!g.csv.empty()) {
                auto os = open_csv(g.csv);
                write_counts_csv(os, representation_counts(a, energy_h));
            }
            emit(g, {{"N", a.size()}, {"h", energy_h}, {"bound", to_json(eb)}});
            return eb.holds ? 0 : 1;
        }
        if (lam->parsed()) {
            const auto a = read_input(lambda_in, g.seed, false);
            const auto est = lambda_lower_bound(a, lam_q, lam_restarts, lam_iters, g.seed);
            Json j = to_json(est);
            const double h = lam_q / 2;
            if (std::floor(h) == h && h >= 1) j["uniform_even"] = lambda_uniform_even(a, static_cast<int>(h));
            j["trivial_upper"] = lambda_trivial_upper(a, lam_q);
            emit(g, j);
            return 0;
        }
        if (reg->parsed()) {
            const auto delta = parse_rational(reg_delta);
            const auto in = random_regularization_instance(reg_n, reg_primes, delta, g.seed);
            const auto r = regularize(in.a1, in.a2, in.g, in.delta);
            const auto au = audit_regularization(in.a1, in.a2, in.g, in.delta, r, g.seed);
            if (!g.csv.empty()) {
                auto os = open_csv(g.csv);
                os << "key,lhs,rhs,measured_ratio,pass\n";
                auto dump = [&os](const Ledger& l) {
                    for (const auto& e : l.entries)
                        os << e.key << ',' << e.lhs << ',' << e.rhs << ',' << e.ratio << ',' << (e.pass ? 1 : 0) << '\n';
                };
                dump(r.level.ledger);
                for (const auto& s : r.step7) dump(s.ledger);
            }
            emit(g, {{"n", reg_n},
                     {"primes", reg_primes},
                     {"delta", to_string(delta)},
                     {"seed", g.seed},
                     {"edges", in.g.edge_count()},
                     {"report", to_json(r)},
                     {"audit", to_json(au)}});
            return au.ok() && r.contained ? 0 : 1;
        }
        if (bnd->parsed()) {
            AdmissiblePair p;
            if (pair_name == "base" || pair_name == "transform") p = base_pair(cfg.q, cfg.C);
            else if (pair_name == "lemma43") p = lemma43_pair(bgamma, cfg.q, cfg.C);
            else p = lemma51_pair(btau, bgamma, cfg.Nbar, cfg);
            const double ln = std::log(bN), ld = std::log(bdelta), lk = std::log(bK);
            Json j = {{"config", config_values(cfg)},
                      {"inputs", {{"N", bN}, {"delta", bdelta}, {"K", bK}, {"gamma", bgamma}, {"tau", btau}}},
                      {"pair", p.provenance},
                      {"params", p.params}};
            bool ok = true;
            if (pair_name == "transform") {
                const auto t = transform_eval(p, ln, ld, lk, cfg.grid, cfg.cq_factor);
                j["transform"] = to_json(t);
                j["log_phi_untransformed"] = p.log_phi(ln, ld, lk);
            } else {
                j["log_phi"] = p.log_phi(ln, ld, lk);
                j["log_psi"] = p.log_psi(ln, ld, lk);
                const auto adm = check_admissible(p);
                j["admissibility"] = to_json(adm);
                ok = adm.pass();
                if (pair_name == "lemma43") j["schedule"] = to_json(lemma43_schedule(bgamma, bdelta, bK, cfg.grid));
                if (pair_name == "lemma51") {
                    const auto& pr = p.params;
                    LambdaConstants k{pr.at("A1"), pr.at("A2"), pr.at("B1"), pr.at("B2")};
                    j["Lambda"] = compute_Lambda(btau, bgamma, cfg.q, k);
                }
            }
            if (bb) j["k_of_b"] = to_json(compute_k_of_b(*bb, cfg));
            if (!chain.empty()) {
                std::vector<Count> sizes(chain.begin(), chain.end());
                const auto c = pigeonhole_chain(sizes, bb.value_or(2));
                j["chain"] = to_json(c);
                ok = ok && c.ratio <= c.geometric_mean * (1 + 1e-12);
            }
            emit(g, j);
            return ok ? 0 : 1;
        }
        if (exp->parsed()) {
            ExperimentOptions opt;
            opt.k_max = exp_kmax.value_or(scale == Scale::Tiny ? 2 : scale == Scale::Small ? 4 : 8);
            opt.budget = g.budget;
            opt.subset_delta = exp_subset;
            opt.seed = g.seed;
            const auto spec = parse_family(exp_family, g.seed);
            const auto r = run_growth_experiment(spec, opt);
            Json j = to_json(r);
            if (exp_driver_b) {
                const int levels = static_cast<int>(std::floor(std::log2(std::max(opt.k_max, 2))));
                j["driver"] = to_json(theorem_driver(generate_family(spec), *exp_driver_b, levels, g.budget));
            }
            if (!g.csv.empty()) {
                auto os = open_csv(g.csv);
                write_experiment_csv(os, r);
            }
            if (!exp_exponent_csv.empty()) {
                auto os = open_csv(exp_exponent_csv);
                write_exponent_csv(os, r);
            }
            emit(g, j);
            if (!r.ok()) return 1;
            return r.budget_hit ? 3 : 0;
        }
        if (ver->parsed()) {
            const auto r = verify_suite(g.seed, scale, tamper);
            if (!g.csv.empty()) {
                auto os = open_csv(g.csv);
                os << "name,pass,detail\n";
                for (const auto& c : r.checks) os << c.name << ',' << (c.pass ? 1 : 0) << ",\"" << c.detail << "\"\n";
            }
            emit(g, to_json(r));
            return r.pass() ? 0 : 1;
        }
    } catch (const BudgetExceeded& e) {
        std::cerr << e.what() << '\n';
        return 3;
    } catch (const InvalidSpec& e) {
        std::cerr << e.what() << '\n';
        return 2;
    } catch (const ParseError& e) {
        std::cerr << e.what() << '\n';
        return 2;
    } catch (const InvalidArgument& e) {
        std::cerr << e.what() << '\n';
        return 2;
    } catch (const NonPositiveElement& e) {
        std::cerr << e.what() << '\n';
        return 2;
    } catch (const Error& e) {
        std::cerr << e.what() << '\n';
        return 1;
    }
    return 2;
}
