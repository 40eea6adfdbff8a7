#include "sumprod/harness.hpp"

#include "rng.hpp"
#include "sumprod/bounds.hpp"
#include "sumprod/errors.hpp"
#include "sumprod/lambda_q.hpp"
#include "sumprod/regularize.hpp"

#include <boost/algorithm/string.hpp>
#include <boost/lexical_cast.hpp>
#include <boost/multiprecision/cpp_int.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <future>
#include <iomanip>
#include <limits>
#include <numeric>
#include <ostream>
#include <random>
#include <set>
#include <sstream>

namespace sumprod {

namespace {

template <class T>
T parse_number(const std::string& s, const std::string& what) {
    try {
        return boost::lexical_cast<T>(boost::trim_copy(s));
    } catch (const boost::bad_lexical_cast&) {
        throw InvalidSpec("bad " + what + ": '" + s + "'");
    }
}

std::vector<std::string> split(const std::string& s, const char* seps) {
    std::vector<std::string> out;
    if (boost::trim_copy(s).empty()) return out;
    boost::split(out, s, boost::is_any_of(seps));
    return out;
}

std::string num(double x) {
    std::ostringstream os;
    os << std::setprecision(10) << x;
    return os.str();
}

IntSet random_set(std::mt19937_64& rng, std::size_t n, std::int64_t range) {
    std::uniform_int_distribution<std::int64_t> d(1, range);
    std::set<std::int64_t> s;
    while (s.size() < n) s.insert(d(rng));
    return IntSet(std::vector<std::int64_t>(s.begin(), s.end()));
}

std::vector<std::uint64_t> first_primes(std::size_t n) {
    std::vector<std::uint64_t> p;
    for (std::uint64_t x = 2; p.size() < n; ++x)
        if (is_prime(x)) p.push_back(x);
    return p;
}

ExpSet random_expset(std::mt19937_64& rng, std::size_t n, std::size_t dim, int max_exp) {
    std::uniform_int_distribution<int> d(0, max_exp);
    std::set<ExponentVector> s;
    const double cap = std::pow(max_exp + 1.0, static_cast<double>(dim));
    n = std::min<std::size_t>(n, static_cast<std::size_t>(cap));
    while (s.size() < n) {
        ExponentVector v(dim);
        for (auto& x : v) x = static_cast<Exponent>(d(rng));
        s.insert(v);
    }
    return ExpSet(PrimeBasis(first_primes(dim)), std::vector<ExponentVector>(s.begin(), s.end()));
}

}  // namespace

// ------------------------------------------------------------------ families

FamilySpec parse_family(const std::string& text, std::uint64_t seed) {
    const auto colon = text.find(':');
    if (colon == std::string::npos) throw InvalidSpec("family needs kind:params, got '" + text + "'");
    const std::string kind = boost::trim_copy(text.substr(0, colon));
    const auto args = split(text.substr(colon + 1), ",");
    FamilySpec s;
    s.seed = seed;
    auto want = [&](std::size_t k) {
        if (args.size() != k) throw InvalidSpec(kind + " takes " + std::to_string(k) + " parameters");
    };
    if (kind == "ap") {
        want(3);
        s.kind = FamilyKind::AP;
        s.start = parse_number<std::int64_t>(args[0], "start");
        s.step = parse_number<std::int64_t>(args[1], "step");
        s.n = parse_number<std::size_t>(args[2], "size");
    } else if (kind == "gp") {
        want(2);
        s.kind = FamilyKind::GP;
        s.base = parse_number<std::uint64_t>(args[0], "base");
        s.n = parse_number<std::size_t>(args[1], "size");
    } else if (kind == "grid" || kind == "multiplicative_grid") {
        s.kind = FamilyKind::MultiplicativeGrid;
        for (const auto& a : args) {
            const auto pe = split(a, "^");
            if (pe.size() != 2) throw InvalidSpec("grid entries look like p^e");
            s.primes.push_back(parse_number<std::uint64_t>(pe[0], "prime"));
            s.exponent_bounds.push_back(parse_number<int>(pe[1], "exponent bound"));
        }
    } else if (kind == "random" || kind == "random_interval") {
        want(2);
        s.kind = FamilyKind::RandomInterval;
        s.n = parse_number<std::size_t>(args[0], "size");
        s.width = parse_number<std::uint64_t>(args[1], "width");
    } else if (kind == "explicit") {
        s.kind = FamilyKind::Explicit;
        for (const auto& a : args) s.values.push_back(parse_number<std::int64_t>(a, "element"));
    } else {
        throw InvalidSpec("unknown family kind '" + kind + "'");
    }
    return s;
}

std::string to_string(const FamilySpec& s) {
    std::ostringstream os;
    switch (s.kind) {
        case FamilyKind::AP: os << "ap:" << s.start << ',' << s.step << ',' << s.n; break;
        case FamilyKind::GP: os << "gp:" << s.base << ',' << s.n; break;
        case FamilyKind::MultiplicativeGrid:
            os << "grid:";
            for (std::size_t i = 0; i < s.primes.size(); ++i)
                os << (i ? "," : "") << s.primes[i] << '^' << s.exponent_bounds[i];
            break;
        case FamilyKind::RandomInterval: os << "random:" << s.n << ',' << s.width << "@seed=" << s.seed; break;
        case FamilyKind::Explicit:
            os << "explicit:";
            for (std::size_t i = 0; i < s.values.size(); ++i) os << (i ? "," : "") << s.values[i];
            break;
    }
    return os.str();
}

IntSet generate_family(const FamilySpec& s) {
    constexpr auto kMax = std::numeric_limits<std::int64_t>::max();
    switch (s.kind) {
        case FamilyKind::AP: {
            if (s.n == 0) throw InvalidSpec("ap needs n >= 1");
            if (s.step <= 0) throw InvalidSpec("ap needs a positive step");
            if (s.start > kMax - static_cast<std::int64_t>(s.n - 1) * s.step) throw InvalidSpec("ap overflows");
            std::vector<std::int64_t> v;
            for (std::size_t i = 0; i < s.n; ++i) v.push_back(s.start + static_cast<std::int64_t>(i) * s.step);
            return IntSet(std::move(v));
        }
        case FamilyKind::GP: {
            if (s.n == 0) throw InvalidSpec("gp needs n >= 1");
            if (s.base < 2) throw InvalidSpec("gp needs base >= 2");
            std::vector<std::int64_t> v{1};
            for (std::size_t i = 1; i < s.n; ++i) {
                if (v.back() > kMax / static_cast<std::int64_t>(s.base)) throw InvalidSpec("gp overflows int64");
                v.push_back(v.back() * static_cast<std::int64_t>(s.base));
            }
            return IntSet(std::move(v));
        }
        case FamilyKind::MultiplicativeGrid: {
            if (s.primes.empty() || s.primes.size() != s.exponent_bounds.size()) throw InvalidSpec("bad grid");
            std::set<std::uint64_t> seen;
            for (auto p : s.primes)
                if (!is_prime(p) || !seen.insert(p).second) throw InvalidSpec("grid needs distinct primes");
            std::vector<std::int64_t> v{1};
            for (std::size_t i = 0; i < s.primes.size(); ++i) {
                if (s.exponent_bounds[i] < 1) throw InvalidSpec("grid exponent bounds must be >= 1");
                std::vector<std::int64_t> next;
                for (auto x : v) {
                    std::int64_t y = x;
                    for (int e = 0; e < s.exponent_bounds[i]; ++e) {
                        next.push_back(y);
                        if (e + 1 < s.exponent_bounds[i]) {
                            if (y > kMax / static_cast<std::int64_t>(s.primes[i])) throw InvalidSpec("grid overflows");
                            y *= static_cast<std::int64_t>(s.primes[i]);
                        }
                    }
                }
                v = std::move(next);
            }
            return IntSet(std::move(v));
        }
        case FamilyKind::RandomInterval: {
            if (s.n == 0 || s.width == 0 || s.n > s.width) throw InvalidSpec("random needs 1 <= n <= width");
            if (s.width > static_cast<std::uint64_t>(kMax)) throw InvalidSpec("width too large");
            std::mt19937_64 rng(s.seed);
            return random_set(rng, s.n, static_cast<std::int64_t>(s.width));
        }
        case FamilyKind::Explicit: {
            IntSet a(s.values);
            if (a.empty()) throw InvalidSpec("explicit family is empty");
            if (a.size() != s.values.size()) throw InvalidSpec("explicit family has repeated elements");
            if (a.min() < 1) throw InvalidSpec("elements must be positive");
            return a;
        }
    }
    throw InvalidSpec("bad family kind");
}

// ------------------------------------------------------------------ experiments

ExperimentResult run_growth_experiment(const FamilySpec& spec, const ExperimentOptions& opt) {
    if (opt.k_max < 2) throw InvalidArgument("k_max must be at least 2");
    const auto t0 = std::chrono::steady_clock::now();
    const IntSet a = generate_family(spec);
    const auto emb = embed_set(a.positive_values());

    ExperimentResult r;
    r.family = to_string(spec);
    r.N = a.size();
    const double logn = std::log(static_cast<double>(r.N));
    auto expo = [&](std::size_t s) { return r.N > 1 ? std::log(static_cast<double>(s)) / logn : 0.0; };

    std::optional<ExpSet> sub, sub_k;
    if (opt.subset_delta > 0) {
        r.subset_size = std::min<std::size_t>(
            r.N, static_cast<std::size_t>(std::ceil(std::pow(static_cast<double>(r.N), opt.subset_delta) - 1e-9)));
        std::vector<std::size_t> idx(r.N);
        std::iota(idx.begin(), idx.end(), 0);
        std::mt19937_64 rng(opt.seed);
        std::shuffle(idx.begin(), idx.end(), rng);
        idx.resize(r.subset_size);
        std::sort(idx.begin(), idx.end());
        sub = emb.set.subset(idx);
        sub_k = sub;
    }

    IntSet s = a;
    ExpSet p = emb.set;
    for (int k = 1; k <= opt.k_max; ++k) {
        if (k > 1) {
            try {
                IntSet s2 = sumset(s, a, opt.budget);
                ExpSet p2 = sumset(p, emb.set, opt.budget);
                std::optional<ExpSet> q2;
                if (sub) q2 = sumset(*sub_k, *sub, opt.budget);
                s = std::move(s2);
                p = std::move(p2);
                if (sub) sub_k = std::move(q2);
            } catch (const BudgetExceeded&) {
                r.budget_hit = true;
                break;
            }
        }
        ExperimentRow row{k, s.size(), p.size(), expo(s.size()), expo(p.size()), std::nullopt};
        if (sub) {
            row.subset_product_size = sub_k->size();
            if (sub_k->size() > p.size()) r.subset_dominated = false;
        }
        if (!r.rows.empty() &&
            (row.sum_size < r.rows.back().sum_size || row.product_size < r.rows.back().product_size))
            r.monotone = false;
        // stars and bars: |kA| <= C(N+k-1, k)
        using boost::multiprecision::cpp_int;
        cpp_int binom = 1;
        for (int i = 1; i <= k; ++i) binom = binom * (r.N + static_cast<std::size_t>(i) - 1) / i;
        if (cpp_int(row.sum_size) > binom || cpp_int(row.product_size) > binom) r.stars_and_bars = false;
        r.rows.push_back(row);
    }

    if (r.N <= 1) {
        r.verdict = "degenerate";
    } else if (r.rows.size() < 2) {
        r.verdict = "incomplete";
    } else {
        const auto& last = r.rows.back();
        r.verdict = last.sum_size > last.product_size   ? "sum horn"
                    : last.sum_size < last.product_size ? "product horn"
                                                        : "tie";
    }
    r.runtime_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return r;
}

void write_exponent_csv(std::ostream& os, const ExperimentResult& r) {
    os << "k,sum_exponent,product_exponent\n";
    os << std::setprecision(12);
    for (const auto& row : r.rows) os << row.k << ',' << row.sum_exponent << ',' << row.product_exponent << '\n';
}

void write_experiment_csv(std::ostream& os, const ExperimentResult& r) {
    std::vector<GrowthRow> rows;
    for (const auto& row : r.rows) rows.push_back({row.k, row.sum_size, row.product_size});
    write_growth_csv(os, rows);
}

RegularizationInstance random_regularization_instance(std::size_t n, std::size_t primes, const Rational& delta,
                                                      std::uint64_t seed) {
    if (n == 0 || primes == 0) throw InvalidArgument("need n, primes >= 1");
    if (std::pow(6.0, static_cast<double>(primes)) < static_cast<double>(n))
        throw InvalidArgument("too few lattice points for n elements");
    std::mt19937_64 rng(seed);
    RegularizationInstance inst;
    inst.a1 = random_expset(rng, n, primes, 5);
    inst.a2 = random_expset(rng, n, primes, 5);
    inst.delta = delta;
    std::bernoulli_distribution coin(std::min(1.0, 1.5 * to_double(delta)));
    std::vector<Edge> edges;
    for (std::uint32_t i = 0; i < n; ++i)
        for (std::uint32_t j = 0; j < n; ++j)
            if (coin(rng)) edges.emplace_back(i, j);
    inst.g = BipartiteGraph(n, n, std::move(edges));
    return inst;
}

// ------------------------------------------------------------------ verify

Scale parse_scale(const std::string& s) {
    if (s == "tiny") return Scale::Tiny;
    if (s == "small") return Scale::Small;
    if (s == "full") return Scale::Full;
    throw InvalidSpec("scale must be tiny, small or full");
}

std::string to_string(Scale s) {
    switch (s) {
        case Scale::Tiny: return "tiny";
        case Scale::Small: return "small";
        case Scale::Full: return "full";
    }
    return "?";
}

bool VerifyReport::pass() const {
    return std::all_of(checks.begin(), checks.end(), [](const VerifyCheck& c) { return c.pass; });
}

VerifyReport verify_suite(std::uint64_t seed, Scale scale, bool tamper) {
    VerifyReport rep;
    rep.seed = seed;
    rep.scale = scale;
    const int mult = scale == Scale::Tiny ? 1 : scale == Scale::Small ? 4 : 10;
    auto rng_for = [seed](std::uint64_t i) { return std::mt19937_64(detail::derive_seed(seed, i)); };
    auto add = [&](std::string name, bool pass, std::string detail) {
        rep.checks.push_back({std::move(name), pass, std::move(detail)});
    };

    {  // lambda_2 = 1
        auto rng = rng_for(1);
        const double expected = tamper ? -1.0 : 1.0;
        double worst = 0;
        const int sets = 5 * mult;
        for (int i = 0; i < sets; ++i) {
            std::uniform_int_distribution<std::size_t> dn(2, scale == Scale::Tiny ? 16 : 64);
            const auto a = random_set(rng, dn(rng), 10000);
            const auto est = lambda_lower_bound(a, 2, 4, 200, detail::derive_seed(seed, 100 + i));
            worst = std::max(worst, std::fabs(est.lower - expected));
        }
        add("parseval_lambda2", worst <= 1e-9, "sets=" + std::to_string(sets) + " max|lambda-" + num(expected) + "|=" + num(worst));
    }
    {  // ||uniform||_4 = (E_2 / N^2)^(1/4)
        auto rng = rng_for(2);
        double worst = 0;
        const int sets = 4 * mult;
        for (int i = 0; i < sets; ++i) {
            std::uniform_int_distribution<std::size_t> dn(2, 32);
            const auto a = random_set(rng, dn(rng), 1000);
            const double n = static_cast<double>(a.size());
            std::vector<Complex> c(a.size(), Complex(1.0 / std::sqrt(n), 0));
            const double lhs = trig_norm(a, c, 4);
            const double rhs = std::pow(to_double(additive_energy(a, 2)) / (n * n), 0.25);
            worst = std::max(worst, std::fabs(lhs - rhs) / rhs);
        }
        add("moment_identity_q4", worst <= 1e-6, "max_rel_err=" + num(worst));
    }
    {  // |hA| >= N^{2h} / E_h
        auto rng = rng_for(3);
        int fails = 0, total = 0;
        for (int i = 0; i < 5 * mult; ++i) {
            std::uniform_int_distribution<std::size_t> dn(1, 12);
            const auto a = random_set(rng, dn(rng), 100);
            for (int h : {2, 3}) {
                ++total;
                if (!energy_sumset_bound(a, h).holds) ++fails;
            }
        }
        add("energy_sumset_bound", fails == 0, "checked=" + std::to_string(total) + " failures=" + std::to_string(fails));
    }
    {  // |A^(k)| = |k A| in the lattice, against direct products
        auto rng = rng_for(4);
        int fails = 0, total = 0;
        for (int i = 0; i < 5 * mult; ++i) {
            std::uniform_int_distribution<std::size_t> dn(1, 12);
            const auto a = random_set(rng, dn(rng), 10000);
            const auto emb = embed_set(a.positive_values());
            std::set<std::int64_t> prods(a.begin(), a.end());
            for (int k = 1; k <= 3; ++k) {
                if (k > 1) {
                    std::set<std::int64_t> next;
                    for (auto x : prods)
                        for (auto y : a) next.insert(x * y);
                    prods = std::move(next);
                }
                ++total;
                if (iterated_sumset(emb.set, k).size() != prods.size()) ++fails;
            }
        }
        add("product_sum_correspondence", fails == 0,
            "checked=" + std::to_string(total) + " failures=" + std::to_string(fails));
    }
    {
        auto rng = rng_for(5);
        int fails = 0;
        const int sets = 10 * mult;
        for (int i = 0; i < sets; ++i) {
            std::uniform_int_distribution<std::size_t> dn(1, 20);
            if (!ruzsa_audit(random_set(rng, dn(rng), 10000)).holds) ++fails;
        }
        add("ruzsa_audit", fails == 0, "sets=" + std::to_string(sets) + " failures=" + std::to_string(fails));
    }
    {
        const std::vector<std::uint64_t> primes{2};
        std::vector<DilateTerm> terms;
        for (std::uint32_t al = 0; al < 3; ++al) terms.push_back({{al}, IntSet{1}, {}});
        const auto r = prop1_ratio(primes, terms, 4);
        const double want = std::pow(15.0, 0.25) / std::sqrt(3.0);
        add("prop1_instance", std::fabs(r.ratio - want) <= 1e-6 && r.c_est < 1,
            "ratio=" + num(r.ratio) + " expected=" + num(want) + " c_est=" + num(r.c_est));
    }
    {  // regularization pipeline against its auditor
        const int inst = scale == Scale::Tiny ? 2 : scale == Scale::Small ? 4 : 25;
        const std::size_t n = scale == Scale::Tiny ? 64 : 128;
        const Rational deltas[] = {Rational(1, 10), Rational(3, 10), Rational(1, 2)};
        std::vector<std::future<std::string>> jobs;
        for (int i = 0; i < inst; ++i)
            jobs.push_back(std::async(std::launch::async, [=] {
                const auto in = random_regularization_instance(n, 4, deltas[i % 3], detail::derive_seed(seed, 700 + i));
                const auto r = regularize(in.a1, in.a2, in.g, in.delta);
                const auto au = audit_regularization(in.a1, in.a2, in.g, in.delta, r, detail::derive_seed(seed, 800 + i));
                if (!au.ok()) return au.failures.front();
                if (!r.contained) return std::string("final graph not contained");
                return std::string();
            }));
        std::string first;
        int fails = 0;
        for (auto& j : jobs) {
            std::string e;
            try {
                e = j.get();
            } catch (const Error& ex) {
                e = ex.what();
            }
            if (!e.empty()) {
                ++fails;
                if (first.empty()) first = e;
            }
        }
        add("regularization_audit", fails == 0,
            "instances=" + std::to_string(inst) + " failures=" + std::to_string(fails) + (first.empty() ? "" : " first: " + first));
    }
    {
        auto rng = rng_for(8);
        int fails = 0;
        const int sets = 10 * mult;
        for (int i = 0; i < sets; ++i) {
            std::uniform_int_distribution<std::size_t> dd(1, 5), dn(1, 30);
            const auto s = random_expset(rng, dn(rng), dd(rng), 3);
            const auto idx = select_injective_coords(s);
            bool ok = is_injective_on(s, idx);
            for (std::size_t drop = 0; ok && idx.size() > 1 && drop < idx.size(); ++drop) {
                auto less = idx;
                less.erase(less.begin() + static_cast<std::ptrdiff_t>(drop));
                if (is_injective_on(s, less)) ok = false;
            }
            if (!freiman_audit(s).lemma_holds) ok = false;
            if (!ok) ++fails;
        }
        add("injective_coords_freiman", fails == 0, "sets=" + std::to_string(sets) + " failures=" + std::to_string(fails));
    }
    {  // bound calculus
        auto rng = rng_for(9);
        std::uniform_real_distribution<double> u(0.01, 10);
        int fails = 0;
        const int samples = 100 * mult;
        for (int i = 0; i < samples; ++i) {
            const double tau = u(rng) / 20, gamma = u(rng) / 20;
            LambdaConstants k{u(rng), u(rng), u(rng), u(rng)};
            if (!lambda_consequences(compute_Lambda(tau, gamma, 4, k), tau, gamma, k).all()) ++fails;
        }
        add("lambda_consequences", fails == 0, "samples=" + std::to_string(samples) + " failures=" + std::to_string(fails));

        int chain_fails = 0;
        for (int i = 0; i < samples; ++i) {
            std::uniform_int_distribution<int> dl(1, 8), step(0, 1000);
            std::vector<Count> sizes{static_cast<Count>(step(rng) + 1)};
            const int ell = dl(rng);
            for (int j = 0; j < ell; ++j) sizes.push_back(sizes.back() + static_cast<Count>(step(rng)));
            const auto c = pigeonhole_chain(sizes, 2);
            if (c.ratio > c.geometric_mean * (1 + 1e-12)) ++chain_fails;
        }
        add("pigeonhole_chain", chain_fails == 0,
            "chains=" + std::to_string(samples) + " failures=" + std::to_string(chain_fails));

        const std::pair<const char*, AdmissiblePair> pairs[] = {
            {"admissible_base", base_pair(4, 2)},
            {"admissible_lemma43", lemma43_pair(0.1)},
            {"admissible_lemma51", lemma51_pair(0.25, 0.25, 1e6)}};
        for (const auto& [name, p] : pairs) {
            const auto r = check_admissible(p);
            add(name, r.pass(), "samples=" + std::to_string(r.samples) + (r.pass() ? "" : " " + r.first_failure));
        }

        const auto bp = base_pair(4, 2);
        const double ln = std::log(1e6), ld = std::log(0.5), lk = std::log(4.0);
        const auto coarse = transform_eval(bp, ln, ld, lk, 8);
        const auto fine = transform_eval(bp, ln, ld, lk, 15);
        const bool mono = fine.log_phi <= coarse.log_phi && fine.log_psi >= coarse.log_psi &&
                          coarse.log_phi <= bp.log_phi(ln, ld, lk);
        add("transform_refinement", mono,
            "log_phi " + num(coarse.log_phi) + " -> " + num(fine.log_phi) + ", log_psi " + num(coarse.log_psi) +
                " -> " + num(fine.log_psi));
    }
    {  // growth experiments
        ExperimentOptions opt;
        opt.k_max = 2;
        const auto gp = run_growth_experiment(parse_family("gp:2,8"), opt);
        const auto ap = run_growth_experiment(parse_family("ap:1,1,8"), opt);
        add("growth_gp", gp.rows[1].sum_size == 36 && gp.rows[1].product_size == 15 && gp.ok(),
            "|2A|=" + std::to_string(gp.rows[1].sum_size) + " |A^(2)|=" + std::to_string(gp.rows[1].product_size));
        add("growth_ap", ap.rows[1].sum_size == 15 && ap.ok() && ap.verdict == "product horn",
            "|2A|=" + std::to_string(ap.rows[1].sum_size) + " |A^(2)|=" + std::to_string(ap.rows[1].product_size));
    }
    return rep;
}

}  // namespace sumprod
