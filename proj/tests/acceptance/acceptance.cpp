// One PASS/FAIL line per acceptance criterion; exit status 1 if any fail.

#include "oracles.hpp"

#include "sumprod/bounds.hpp"
#include "sumprod/harness.hpp"
#include "sumprod/lambda_q.hpp"
#include "sumprod/regularize.hpp"
#include "sumprod/setops.hpp"

#include <json.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <numeric>
#include <random>
#include <sstream>
#include <string>

using namespace sumprod;
using oracle::cpp_int;

namespace {

struct Outcome {
    bool pass = true;
    std::string detail;
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(double x) {
    std::ostringstream os;
    os.precision(10);
    os << x;
    return os.str();
}

Outcome fail(Outcome o, const std::string& why) {
    if (o.pass) o.detail = why;
    o.pass = false;
    return o;
}

// 1
Outcome parseval() {
    const auto t0 = std::chrono::steady_clock::now();
    std::mt19937_64 rng(101);
    double worst = 0;
    Outcome o;
    for (int t = 0; t < 50; ++t) {
        auto a = oracle::random_set(rng, 1 + rng() % 64, 0, 10000);
        auto est = lambda_lower_bound(IntSet(a), 2, 32, 500, static_cast<std::uint64_t>(t));
        worst = std::max(worst, std::abs(est.lower - 1));
    }
    const double secs = seconds_since(t0);
    o.detail = "max |lambda_2 - 1| = " + fmt(worst) + ", " + fmt(secs) + " s";
    if (worst > 1e-9) o = fail(o, o.detail);
    if (secs >= 5) o = fail(o, o.detail);
    return o;
}

// 2
Outcome moment_identity() {
    std::mt19937_64 rng(202);
    double worst = 0;
    for (int t = 0; t < 20; ++t) {
        auto a = oracle::random_set(rng, 1 + rng() % 32, 0, 10000);
        const double n = static_cast<double>(a.size());
        std::vector<Complex> c(a.size(), Complex(1 / std::sqrt(n), 0));
        const double e = static_cast<double>(oracle::quadruples(a));
        const double want = std::pow(e / (n * n), 0.25);
        worst = std::max(worst, std::abs(trig_norm(IntSet(a), c, 4) - want) / want);
    }
    Outcome o{worst <= 1e-6, "max relative error " + fmt(worst)};
    return o;
}

// 3
Outcome energy_chain() {
    std::size_t checked = 0, failed = 0;
    auto check = [&](const oracle::Vec& a) {
        const cpp_int n = a.size();
        for (int h : {2, 3}) {
            const cpp_int lhs = cpp_int(oracle::ksum(a, h).size()) * oracle::energy(a, h);
            cpp_int rhs = 1;
            for (int i = 0; i < 2 * h; ++i) rhs *= n;
            ++checked;
            if (lhs < rhs) ++failed;
        }
    };
    // every subset of {0..12}, then random sets in [0, 100]
    for (std::uint32_t mask = 1; mask < (1u << 13); ++mask) {
        oracle::Vec a;
        for (int i = 0; i < 13; ++i)
            if (mask >> i & 1) a.push_back(i);
        if (a.size() <= 12) check(a);
    }
    std::mt19937_64 rng(303);
    for (int t = 0; t < 2000; ++t) check(oracle::random_set(rng, 1 + rng() % 12, 0, 100));
    return {failed == 0, std::to_string(checked - failed) + "/" + std::to_string(checked) + " (A, h) pairs hold"};
}

// 4
Outcome correspondence() {
    std::mt19937_64 rng(404);
    std::size_t checked = 0, failed = 0;
    for (int t = 0; t < 100; ++t) {
        auto a = oracle::random_set(rng, 1 + rng() % 20, 1, 10000);
        std::vector<std::uint64_t> u(a.begin(), a.end());
        auto emb = embed_set(u);
        for (int k = 1; k <= 4; ++k) {
            const auto lattice = iterated_sumset(emb.set, k).size();
            const auto direct = product_set(IntSet(a), k).size();
            const auto brute = oracle::kprod(a, k).size();
            ++checked;
            if (lattice != direct || direct != brute) ++failed;
        }
    }
    return {failed == 0, std::to_string(checked - failed) + "/" + std::to_string(checked) + " (A, k) pairs equal"};
}

// 5
Outcome ruzsa() {
    std::mt19937_64 rng(505);
    std::size_t failed = 0;
    for (int t = 0; t < 100; ++t) {
        auto a = oracle::random_set(rng, 1 + rng() % 30, 1, 10000);
        auto r = ruzsa_audit(IntSet(a));
        std::set<std::pair<std::int64_t, std::int64_t>> quot;
        for (auto x : a)
            for (auto y : a) {
                const auto g = std::gcd(x, y);
                quot.emplace(x / g, y / g);
            }
        const auto prod = oracle::kprod(a, 2).size();
        const cpp_int lhs = cpp_int(quot.size()) * a.size();
        const cpp_int rhs = cpp_int(prod) * prod;
        if (r.difference_size != quot.size() || r.sumset_size != prod || !r.holds || lhs > rhs) ++failed;
    }
    return {failed == 0, std::to_string(100 - failed) + "/100 sets hold and match the quotient oracle"};
}

// 6
Outcome prop1() {
    const std::vector<std::uint64_t> two{2};
    std::vector<DilateTerm> terms;
    for (std::uint32_t al = 0; al < 3; ++al) terms.push_back({{al}, IntSet{1}, {}});
    auto r = prop1_ratio(two, terms, 4);
    const double q = static_cast<double>(oracle::quadruples({1, 2, 4}));
    const double want = std::pow(q, 0.25) / std::sqrt(3.0);
    const double closed = std::pow(15.0, 0.25) / std::sqrt(3.0);
    Outcome o{std::abs(r.ratio - want) <= 1e-6 && std::abs(want - closed) <= 1e-12 && r.c_est < 1,
              "ratio " + fmt(r.ratio) + ", oracle " + fmt(want) + ", C_est " + fmt(r.c_est)};
    return o;
}

bool scan_ok(const BipartiteGraph& g, const DensityRegularization& d) {
    std::vector<char> inl(g.n_left(), 0), inr(g.n_right(), 0);
    for (auto x : d.left) inl[x] = 1;
    for (auto y : d.right) inr[y] = 1;
    const auto L = static_cast<std::int64_t>(d.left.size()), R = static_cast<std::int64_t>(d.right.size());
    const Rational quarter = d.delta / 4;
    for (auto x : d.left) {
        std::int64_t c = 0;
        for (auto y : g.row(x)) c += inr[y];
        if (!exceeds(c, quarter, R)) return false;
    }
    for (auto y : d.right) {
        std::int64_t c = 0;
        for (auto x : g.column(y)) c += inl[x];
        if (!exceeds(c, quarter, L)) return false;
    }
    return !d.left.empty() && !d.right.empty();
}

bool retention_ok(const DyadicResult& d) {
    if (d.total <= 0) return true;
    const double floor = 1 / (std::log2(static_cast<double>(std::max<std::size_t>(d.max_fiber, 1))) + 1);
    return d.retained >= floor * d.total * (1 - 1e-12);
}

// 7
Outcome regularization() {
    const Rational deltas[] = {Rational(1, 10), Rational(3, 10), Rational(1, 2)};
    std::size_t ok = 0, dyadic_calls = 0, inner_levels = 0;
    std::string first;
    for (int t = 0; t < 25; ++t) {
        auto inst = random_regularization_instance(128, 4, deltas[t % 3], 7000 + static_cast<std::uint64_t>(t));
        std::string why;
        try {
            auto rep = regularize(inst.a1, inst.a2, inst.g, inst.delta);
            auto au = audit_regularization(inst.a1, inst.a2, inst.g, inst.delta, rep, static_cast<std::uint64_t>(t));
            std::string lw;
            if (!au.ok()) why = "auditor: " + au.failures.front();
            else if (!ledgers_agree(rep.level.ledger, au.level, 1e-9, &lw)) why = "level ledger: " + lw;
            else if (au.step7.size() != rep.step7.size()) why = "step 7 ledger count";
            for (std::size_t i = 0; why.empty() && i < rep.step7.size(); ++i)
                if (!ledgers_agree(rep.step7[i].ledger, au.step7[i], 1e-9, &lw)) why = "step 7 ledger: " + lw;
            if (why.empty() && rep.step7.size() != rep.level.g10.size()) why = "step 7 incomplete";
            const auto& work = rep.level.swapped ? inst.g.transpose() : inst.g;
            if (why.empty() && !scan_ok(work, rep.level.step1)) why = "step 1 scan";
            std::vector<const DyadicResult*> calls{&rep.level.dyadic1, &rep.level.dyadic2};
            for (const auto& s : rep.step7)
                if (s.inner) {
                    ++inner_levels;
                    calls.push_back(&s.inner->dyadic1);
                    calls.push_back(&s.inner->dyadic2);
                }
            for (auto* d : calls) {
                ++dyadic_calls;
                if (why.empty() && !retention_ok(*d)) why = "dyadic retention";
            }
            if (why.empty() && !rep.contained) why = "containment";
        } catch (const std::exception& e) {
            why = e.what();
        }
        if (why.empty()) ++ok;
        else if (first.empty()) first = "instance " + std::to_string(t) + ": " + why;
    }
    std::string d = std::to_string(ok) + "/25 instances; " + std::to_string(dyadic_calls) + " dyadic calls, " +
                    std::to_string(inner_levels) + " inner levels";
    if (!first.empty()) d += "; " + first;
    return {ok == 25, d};
}

// 8
Outcome injectivity() {
    std::mt19937_64 rng(808);
    const std::vector<std::uint64_t> primes{2, 3, 5, 7, 11, 13};
    std::size_t failed = 0;
    for (int t = 0; t < 100; ++t) {
        const std::size_t dim = 1 + rng() % 6;
        auto v = oracle::random_vectors(rng, 1 + rng() % 30, dim, 1 + static_cast<std::uint32_t>(rng() % 4));
        ExpSet s(PrimeBasis(std::vector<std::uint64_t>(primes.begin(), primes.begin() + static_cast<long>(dim))),
                 std::vector<ExponentVector>(v.begin(), v.end()));
        auto keep = select_injective_coords(s);
        bool good = !keep.empty() && is_injective_on(s, keep);
        for (std::size_t i = 0; good && i < keep.size() && keep.size() > 1; ++i) {
            auto fewer = keep;
            fewer.erase(fewer.begin() + static_cast<long>(i));
            if (is_injective_on(s, fewer)) good = false;
        }
        std::vector<std::vector<cpp_int>> m;
        for (std::size_t i = 1; i < v.size(); ++i) {
            std::vector<cpp_int> row;
            for (std::size_t j = 0; j < dim; ++j) row.push_back(cpp_int(v[i][j]) - v[0][j]);
            m.push_back(row);
        }
        if (freiman_dimension(s) != oracle::bareiss_rank(m)) good = false;
        if (!good) ++failed;
    }
    return {failed == 0, std::to_string(100 - failed) + "/100 sets minimal and rank-matched"};
}

// 9
Outcome bound_calculus() {
    std::mt19937_64 rng(909);
    std::uniform_real_distribution<double> u(1e-3, 1);
    std::size_t lam_bad = 0, chain_bad = 0;
    for (int t = 0; t < 1000; ++t) {
        LambdaConstants c{100 * u(rng), 100 * u(rng), 100 * u(rng), 100 * u(rng)};
        const double tau = u(rng) / 2, gamma = u(rng) / 2;
        const double L = compute_Lambda(tau, gamma, 4, c);
        const double want = 2 * c.A1 / tau + c.A2 + c.B1 + 2 * c.B2 / gamma;
        if (std::abs(L - want) > 1e-14 * want) ++lam_bad;
        if (!(L > 2 * c.A1 / tau && L > c.B1 && L * gamma > 2 * c.B2)) ++lam_bad;
        if (!lambda_consequences(L, tau, gamma, c).all()) ++lam_bad;
    }
    for (int t = 0; t < 1000; ++t) {
        const std::size_t ell = 1 + rng() % 8;
        std::vector<Count> s{2 + rng() % 50};
        for (std::size_t j = 0; j < ell; ++j) s.push_back(s.back() + rng() % (3 * s.back()));
        const int b = 1 + static_cast<int>(rng() % 4);
        auto r = pigeonhole_chain(s, b);
        double gm = 1;
        for (std::size_t j = 0; j < ell; ++j) gm *= static_cast<double>(s[j + 1]) / static_cast<double>(s[j]);
        gm = std::pow(gm, 1.0 / static_cast<double>(ell));
        if (r.ratio > gm * (1 + 1e-12)) ++chain_bad;
    }
    auto base = check_admissible(base_pair(4, 2));
    auto l43 = check_admissible(lemma43_pair(0.1));
    auto p51 = lemma51_pair(0.1, 0.1, 1e6);
    auto l51 = check_admissible(p51, sample_domain(p51));
    const bool ok = lam_bad == 0 && chain_bad == 0 && base.pass() && l43.pass() && l51.pass();
    std::string d = "Lambda failures " + std::to_string(lam_bad) + ", chain failures " + std::to_string(chain_bad) +
                    ", sampler base/lemma43/lemma51 " + (base.pass() ? "ok" : base.first_failure) + "/" +
                    (l43.pass() ? "ok" : l43.first_failure) + "/" + (l51.pass() ? "ok" : l51.first_failure);
    return {ok, d};
}

// 10
Outcome dichotomy() {
    namespace fs = std::filesystem;
    const auto dir = fs::temp_directory_path() / "sumprod_acceptance";
    fs::create_directories(dir);
    const auto t0 = std::chrono::steady_clock::now();
    auto run = [&](const std::string& fam, const std::string& tag, nlohmann::json& out, std::string& csv) {
        const auto csv_path = (dir / (tag + ".csv")).string();
        const std::string cmd = std::string("\"") + SUMPROD_CLI + "\" --scale small experiment --family " + fam +
                                " --driver 2 --exponent-csv \"" + csv_path + "\"";
        FILE* p = popen(cmd.c_str(), "r");
        if (!p) return false;
        std::string text;
        char buf[4096];
        while (std::size_t n = fread(buf, 1, sizeof buf, p)) text.append(buf, n);
        if (pclose(p) != 0) return false;
        out = nlohmann::json::parse(text);
        std::ifstream in(csv_path);
        std::stringstream ss;
        ss << in.rdbuf();
        csv = ss.str();
        return true;
    };
    nlohmann::json gp, ap;
    std::string gp_csv, ap_csv;
    if (!run("gp:2,16", "gp", gp, gp_csv) || !run("ap:1,1,16", "ap", ap, ap_csv))
        return {false, "CLI run failed"};
    const double secs = seconds_since(t0);
    const auto gp2 = gp["driver"]["rows"][1]["sumset_size"].get<std::size_t>();
    const auto ap2 = ap["driver"]["rows"][1]["sumset_size"].get<std::size_t>();
    const auto gv = gp["driver"]["verdict"].get<std::string>(), av = ap["driver"]["verdict"].get<std::string>();
    const std::string header = "k,sum_exponent,product_exponent\n";
    const bool csv_ok = gp_csv.rfind(header, 0) == 0 && ap_csv.rfind(header, 0) == 0 &&
                        std::count(gp_csv.begin(), gp_csv.end(), '\n') > 1;
    const bool ok = gp2 == 136 && ap2 == 31 && gv == "sum horn" && av == "product horn" && csv_ok && secs < 60;
    return {ok, "gp: |2A| = " + std::to_string(gp2) + ", " + gv + "; ap: |2A| = " + std::to_string(ap2) + ", " + av +
                    "; csv " + (csv_ok ? "ok" : "missing") + "; " + fmt(secs) + " s"};
}

}  // namespace

int main() {
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
        {"parseval_lambda2", parseval},       {"uniform_moment_identity", moment_identity},
        {"energy_sumset_chain", energy_chain}, {"product_sum_correspondence", correspondence},
        {"ruzsa_audit", ruzsa},               {"dilate_instance", prop1},
        {"regularization_ledger", regularization}, {"injectivity_freiman", injectivity},
        {"bound_calculus", bound_calculus},    {"dichotomy_illustration", dichotomy},
    };
    int failures = 0, i = 0;
    for (const auto& [name, fn] : criteria) {
        ++i;
        Outcome o;
        const auto t0 = std::chrono::steady_clock::now();
        try {
            o = fn();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        if (!o.pass) ++failures;
        std::cout << (o.pass ? "PASS" : "FAIL") << " " << i << " " << name << ": " << o.detail << " ["
                  << fmt(seconds_since(t0)) << " s]" << std::endl;
    }
    return failures == 0 ? 0 : 1;
}
