// Recomputes the regularization ledgers from the sets stored in a report.
// Deliberately self-contained: fibers, degrees, sumsets and pass rules are
// re-derived here with ordered containers instead of the constructor's
// helpers.

#include "sumprod/regularize.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <set>

namespace sumprod {

namespace {

using EdgeSet = std::set<std::pair<std::uint32_t, std::uint32_t>>;
using Point = std::vector<std::int64_t>;

double lg(double x) {
    const double v = std::log(x);
    return v < 1.0 ? 1.0 : v;
}

double q(const Rational& r) { return static_cast<double>(r.numerator()) / static_cast<double>(r.denominator()); }

void put(Ledger& l, const std::string& key, double lhs, double rhs, const std::string& rel, bool with_constant) {
    LedgerEntry e;
    e.key = key;
    e.lhs = lhs;
    e.rhs = rhs;
    e.relation = rel;
    e.has_constant = with_constant;
    e.ratio = lhs / rhs;
    const bool ok_ratio = !std::isnan(e.ratio) && !std::isinf(e.ratio);
    bool pass = false;
    if (rel == "~") {
        pass = ok_ratio && 4.0 * e.ratio >= 1.0 && e.ratio <= 4.0;
    } else if (rel[0] == '>') {
        pass = with_constant ? (ok_ratio && e.ratio > 0) : (rel.size() == 2 ? !(lhs < rhs) : lhs > rhs);
        if (!with_constant && rel.size() == 2 && (std::isnan(lhs) || std::isnan(rhs))) pass = false;
    } else {
        pass = with_constant ? ok_ratio : (rel.size() == 2 ? !(lhs > rhs) : lhs < rhs);
        if (!with_constant && rel.size() == 2 && (std::isnan(lhs) || std::isnan(rhs))) pass = false;
    }
    e.pass = pass;
    l.entries.push_back(e);
}

std::size_t pow2_floor(std::size_t n) {
    std::size_t p = 1;
    while (p * 2 <= n) p *= 2;
    return p;
}

// Fibers keyed by prefix; std::map iteration gives lexicographic order.
std::vector<IndexSet> group(const ExpSet& s, const IndexSet& subset, std::size_t prefix) {
    std::map<std::vector<Exponent>, IndexSet> by;
    for (auto i : subset) {
        const auto v = s[i];
        by[std::vector<Exponent>(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(prefix))].push_back(i);
    }
    std::vector<IndexSet> out;
    for (auto& [k, v] : by) {
        std::sort(v.begin(), v.end());
        out.push_back(std::move(v));
    }
    return out;
}

std::size_t largest(const std::vector<IndexSet>& fs) {
    std::size_t b = 0;
    for (const auto& f : fs) b = std::max(b, f.size());
    return b;
}

Point add(std::span<const Exponent> x, std::span<const Exponent> y, std::size_t upto) {
    Point p(upto);
    for (std::size_t c = 0; c < upto; ++c) p[c] = static_cast<std::int64_t>(x[c]) + y[c];
    return p;
}

bool subset_of(const IndexSet& small, const IndexSet& big) {
    std::set<std::uint32_t> b(big.begin(), big.end());
    return std::all_of(small.begin(), small.end(), [&](std::uint32_t x) { return b.count(x) > 0; });
}

struct Derived {
    std::size_t N1 = 0, N2 = 0, m1 = 0, m2 = 0, split = 0;
    Rational delta1;
    double L = 0, K0 = 0;
    std::vector<IndexSet> f1, f2;
    std::size_t min_g10_fiber = 0;
    std::size_t a1bb = 0, a2bb = 0;
    bool swapped = false;
};

struct Ctx {
    AuditReport& out;
    std::mt19937_64& rng;
    void fail(const std::string& m) { out.failures.push_back(m); }
};

Derived audit_level(const ExpSet& in1, const ExpSet& in2, const EdgeSet& in_edges, const Rational& delta,
                    const LevelReport& r, Ledger& ledger, Ctx& ctx, const std::string& tag) {
    Derived d;
    d.swapped = r.swapped;
    const ExpSet& X1 = r.swapped ? in2 : in1;
    const ExpSet& X2 = r.swapped ? in1 : in2;
    EdgeSet E;
    for (const auto& [a, b] : in_edges) E.insert(r.swapped ? std::make_pair(b, a) : std::make_pair(a, b));
    d.N1 = X1.size();
    d.N2 = X2.size();
    d.split = r.split;
    const double N1 = static_cast<double>(d.N1), N2 = static_cast<double>(d.N2);
    const double dl = q(delta);

    std::set<Point> all_sums;
    for (const auto& [a, b] : E) all_sums.insert(add(X1[a], X2[b], X1.dim()));
    const double K = static_cast<double>(all_sums.size()) / std::sqrt(N1 * N2);

    // Step 1 sets.
    const IndexSet& A1p = r.step1.left;
    const IndexSet& A2p = r.step1.right;
    const std::set<std::uint32_t> s1(A1p.begin(), A1p.end()), s2(A2p.begin(), A2p.end());
    std::map<std::uint32_t, std::size_t> rowdeg, coldeg;
    std::size_t inside = 0;
    for (const auto& [a, b] : E) {
        if (s1.count(a) && s2.count(b)) {
            ++rowdeg[a];
            ++coldeg[b];
            ++inside;
        }
    }
    const auto num = delta.numerator(), den = delta.denominator();
    std::size_t min_row = SIZE_MAX, min_col = SIZE_MAX;
    bool rows = true, cols = true;
    for (auto a : A1p) {
        const std::size_t dg = rowdeg[a];
        min_row = std::min(min_row, dg);
        // dg > (δ/4) |A2'|
        if (!(static_cast<__int128>(dg) * 4 * den > static_cast<__int128>(num) * static_cast<std::int64_t>(A2p.size())))
            rows = false;
    }
    for (auto b : A2p) {
        const std::size_t dg = coldeg[b];
        min_col = std::min(min_col, dg);
        if (!(static_cast<__int128>(dg) * 4 * den > static_cast<__int128>(num) * static_cast<std::int64_t>(A1p.size())))
            cols = false;
    }
    bool blocks = true;
    std::bernoulli_distribution coin(0.5);
    for (int trial = 0; trial < 64; ++trial) {
        for (int side = 0; side < 2; ++side) {
            const IndexSet& base = side == 0 ? A1p : A2p;
            IndexSet B;
            for (auto x : base)
                if (coin(ctx.rng)) B.push_back(x);
            if (B.empty()) B.push_back(base[static_cast<std::size_t>(ctx.rng() % base.size())]);
            std::size_t cnt = 0;
            for (auto x : B) cnt += side == 0 ? rowdeg[x] : coldeg[x];
            const std::size_t other = side == 0 ? A2p.size() : A1p.size();
            if (!(static_cast<__int128>(cnt) * 4 * den >
                  static_cast<__int128>(num) * static_cast<std::int64_t>(B.size() * other)))
                blocks = false;
        }
    }
    if (tag.empty()) {
        ctx.out.rows_ok = rows;
        ctx.out.columns_ok = cols;
        ctx.out.blocks_ok = blocks;
    }
    if (!rows) ctx.fail(tag + "row scan found a violating row");
    if (!cols) ctx.fail(tag + "column scan found a violating column");
    if (!blocks) ctx.fail(tag + "random block violates the density condition");

    const double n1p = static_cast<double>(A1p.size()), n2p = static_cast<double>(A2p.size());
    put(ledger, "3.9", static_cast<double>(min_row), dl / 4 * n2p, ">", false);
    put(ledger, "3.10", static_cast<double>(min_col), dl / 4 * n1p, ">", false);
    put(ledger, "3.11", std::min(n1p / N1, n2p / N2), 0.75 * dl, ">", false);
    put(ledger, "3.12", static_cast<double>(E.size() - inside), dl / 4 * (N1 * N2 - n1p * n2p), "<=", false);

    // Step 3.
    const auto fibA1p = group(X1, A1p, r.split);
    const std::size_t n1t = largest(fibA1p);
    if (r.xbar_elements.size() != n1t) ctx.fail(tag + "chosen fiber is not a largest fiber of A1'");
    const std::set<std::uint32_t> Eset(r.xbar_elements.begin(), r.xbar_elements.end());
    for (auto z : r.a2_dprime) {
        std::size_t c = 0;
        for (auto x : r.xbar_elements) c += E.count({x, z});
        // c > (δ/8)|E|
        if (!(static_cast<__int128>(c) * 8 * den >
              static_cast<__int128>(num) * static_cast<std::int64_t>(r.xbar_elements.size())))
            ctx.fail(tag + "A2'' element fails the Fact 1 recount");
    }
    put(ledger, "3.16", static_cast<double>(r.a2_dprime.size()), dl / 8 * n2p, ">", false);

    if (!subset_of(r.a2_dprime, A2p) || !subset_of(r.a2_bar, r.a2_dprime) || !subset_of(r.a2_bbar, r.a2_bar) ||
        !subset_of(r.a1_bar, A1p) || !subset_of(r.a1_bbar, r.a1_bar))
        ctx.fail(tag + "regularized sets are not nested");

    const auto fib2 = group(X2, r.a2_bbar, r.split);
    const auto fib1 = group(X1, r.a1_bbar, r.split);
    auto regular = [&](const std::vector<IndexSet>& fs, std::size_t& m) {
        std::size_t smallest = SIZE_MAX;
        for (const auto& f : fs) smallest = std::min(smallest, f.size());
        m = fs.empty() ? 0 : pow2_floor(smallest);
        return std::all_of(fs.begin(), fs.end(), [&](const IndexSet& f) { return f.size() < 2 * m; });
    };
    bool fib_ok = regular(fib2, d.m2) && regular(fib1, d.m1);
    if (d.m2 != r.m2 || d.m1 != r.m1 || fib1.size() != r.M1 || fib2.size() != r.M2) fib_ok = false;
    if (!fib_ok) ctx.fail(tag + "fiber sizes are not within one dyadic class");
    if (tag.empty()) ctx.out.fibers_ok = fib_ok;

    // Dyadic retention on both sides.
    auto retention = [&](const ExpSet& S, const IndexSet& before, const IndexSet& after, auto weight) {
        double total = 0, kept = 0;
        for (auto x : before) total += weight(x);
        for (auto x : after) kept += weight(x);
        const std::size_t mf = largest(group(S, before, r.split));
        std::size_t cls = 0;
        for (std::size_t p = 1; p <= mf; p *= 2) ++cls;
        return kept * static_cast<double>(cls) >= total;
    };
    const std::set<std::uint32_t> s2bb(r.a2_bbar.begin(), r.a2_bbar.end());
    const bool dy2 = retention(X2, r.a2_bar, r.a2_bbar, [&](std::uint32_t z) {
        double c = 0;
        for (auto x : A1p) c += static_cast<double>(E.count({x, z}));
        return c;
    });
    const bool dy1 = retention(X1, r.a1_bar, r.a1_bbar, [&](std::uint32_t x) {
        double c = 0;
        for (auto z : r.a2_bbar) c += static_cast<double>(E.count({x, z}));
        return c;
    });
    if (!dy1 || !dy2) ctx.fail(tag + "dyadic retention below 1/(log2 max fiber + 1)");
    if (tag.empty()) ctx.out.dyadic_ok = dy1 && dy2;

    const double quarter_root = std::pow(N1 * N2, 0.25);
    const double L_ = lg(K / dl);
    const double nn1 = static_cast<double>(r.a1_bbar.size()), nn2 = static_cast<double>(r.a2_bbar.size());
    const double m1 = static_cast<double>(d.m1), m2 = static_cast<double>(d.m2);
    const double M1 = static_cast<double>(fib1.size()), M2 = static_cast<double>(fib2.size());
    d.a1bb = r.a1_bbar.size();
    d.a2bb = r.a2_bbar.size();

    put(ledger, "3.21", m2, static_cast<double>(n1t), "<=", false);
    put(ledger, "3.24", nn2, dl * dl * dl / L_ * N2, ">", true);
    put(ledger, "3.24'", nn2, M2 * m2, "~", false);
    put(ledger, "3.25m", m2, std::pow(dl, 5) / (K * K) * quarter_root, ">", true);
    put(ledger, "3.25", M2, std::pow(dl, -5) * K * K * N2 / quarter_root, "<", true);
    put(ledger, "3.31'", nn1, M1 * m1, "~", false);
    put(ledger, "3.33", nn1, dl * dl / (L_ * L_) * N1, ">", true);
    std::size_t cross = 0;
    for (auto x : r.a1_bbar)
        for (auto z : r.a2_bbar) cross += E.count({x, z});
    put(ledger, "3.34", static_cast<double>(cross), dl / (L_ * L_) * nn1 * nn2, ">", true);
    put(ledger, "3.35m", m1, std::pow(dl, 10) * std::pow(K, -5) * quarter_root, ">", true);
    put(ledger, "3.35", M1, std::pow(dl, -10) * std::pow(K, 5) * N1 / quarter_root, "<", true);

    // Step 5, over the recomputed fibers.
    if (fib1 != r.fibers1 || fib2 != r.fibers2) ctx.fail(tag + "reported fibers differ from the recount");
    auto pair_edges = [&](const std::pair<std::uint32_t, std::uint32_t>& bp) {
        std::vector<std::pair<std::uint32_t, std::uint32_t>> es;
        for (auto x : fib1.at(bp.first))
            for (auto z : fib2.at(bp.second))
                if (E.count({x, z})) es.emplace_back(x, z);
        return es;
    };
    bool first = true;
    for (const auto& bp : r.g1_prime) {
        const auto es = pair_edges(bp);
        if (es.empty()) ctx.fail(tag + "base pair without fiber edges");
        const Rational dens(static_cast<std::int64_t>(es.size()),
                            static_cast<std::int64_t>(fib1[bp.first].size() * fib2[bp.second].size()));
        if (first || dens < d.delta1) d.delta1 = dens;
        first = false;
    }
    const std::set<BasePair> g1p(r.g1_prime.begin(), r.g1_prime.end());
    const std::set<BasePair> g1pp(r.g1_dprime.begin(), r.g1_dprime.end());
    for (const auto& bp : r.g1_dprime)
        if (!g1p.count(bp)) ctx.fail(tag + "G1'' is not inside G1'");
    for (const auto& bp : r.g10)
        if (!g1pp.count(bp)) ctx.fail(tag + "G10 is not inside G1''");

    const double root_m = std::sqrt(m1 * m2);
    std::size_t min_s = SIZE_MAX;
    d.min_g10_fiber = SIZE_MAX;
    std::set<Point> base_sums;
    EdgeSet tilde;
    for (const auto& bp : r.g10) {
        const auto es = pair_edges(bp);
        std::set<Point> sums;
        for (const auto& [x, z] : es) {
            sums.insert(add(X1[x], X2[z], X1.dim()));
            tilde.insert({x, z});
        }
        min_s = std::min(min_s, sums.size());
        d.min_g10_fiber = std::min(d.min_g10_fiber, es.size());
        base_sums.insert(add(X1[fib1[bp.first][0]], X2[fib2[bp.second][0]], r.split));
    }
    d.L = static_cast<double>(min_s) / root_m;
    d.K0 = static_cast<double>(base_sums.size()) / std::sqrt(M1 * M2);
    const EdgeSet reported(r.g_tilde.begin(), r.g_tilde.end());
    if (reported != tilde) ctx.fail(tag + "reported G~ differs from the recount");
    const double d1 = q(d.delta1);
    const double d0 = static_cast<double>(r.g10.size()) / (M1 * M2);

    put(ledger, "3.38", d1, dl / (L_ * L_), ">", true);
    put(ledger, "3.44", static_cast<double>(r.g10.size()), static_cast<double>(r.g1_dprime.size()) / L_, ">", false);
    put(ledger, "3.45", d0, dl / (d1 * std::pow(L_, 4)), ">", true);
    put(ledger, "3.47", d.K0 * d.L, std::pow(dl, -2.5) * std::pow(L_, 1.5) * K, "<", true);
    put(ledger, "3.50", static_cast<double>(tilde.size()), dl / std::pow(L_, 4) * nn1 * nn2, ">", true);
    put(ledger, "3.51", nn1 * nn2, std::pow(dl, 5) / std::pow(L_, 3) * N1 * N2, ">", false);
    d.f1 = fib1;
    d.f2 = fib2;
    return d;
}

Ledger audit_base(const ExpSet& in1, const ExpSet& in2, const EdgeSet& in_edges, const Derived& outer,
                  const BaseRefinement& br, Ctx& ctx, const std::string& tag) {
    const ExpSet& X1 = outer.swapped ? in2 : in1;
    const ExpSet& X2 = outer.swapped ? in1 : in2;
    EdgeSet E;
    for (const auto& [a, b] : in_edges) E.insert(outer.swapped ? std::make_pair(b, a) : std::make_pair(a, b));
    const IndexSet& F1 = outer.f1.at(br.base.first);
    const IndexSet& F2 = outer.f2.at(br.base.second);
    const std::size_t dim = X1.dim(), tail = dim - outer.split;

    EdgeSet fiber_edges;
    for (auto x : F1)
        for (auto z : F2)
            if (E.count({x, z})) fiber_edges.insert({x, z});
    for (const auto& e : br.k_tilde)
        if (!fiber_edges.count(e)) ctx.fail(tag + "refined edge outside its fiber graph");

    std::size_t ell1 = 1, ell2 = 1, mbar1 = F1.size(), mbar2 = F2.size(), max_inner = 1, k10 = 0, min_k = 1;
    double Kk = 1, Li = 1;
    Rational d3(1);
    if (tail >= 1)
        max_inner = std::max(largest(group(X1, F1, outer.split + 1)), largest(group(X2, F2, outer.split + 1)));
    if (tail <= 1) {
        k10 = fiber_edges.size();
        if (tail == 1) {
            std::set<Point> sums;
            for (const auto& [x, z] : fiber_edges) sums.insert(add(X1[x], X2[z], dim));
            Kk = static_cast<double>(sums.size()) / std::sqrt(static_cast<double>(F1.size() * F2.size()));
        }
    } else if (!br.inner) {
        ctx.fail(tag + "missing inner report");
    } else {
        std::vector<std::size_t> tail_idx;
        for (std::size_t c = outer.split; c < dim; ++c) tail_idx.push_back(c);
        const PrimeBasis tb = X1.basis().sub_basis(tail_idx);
        auto local = [&](const ExpSet& S, const IndexSet& F) {
            std::vector<ExponentVector> v;
            for (auto x : F) v.emplace_back(S[x].begin() + static_cast<std::ptrdiff_t>(outer.split), S[x].end());
            return ExpSet(tb, v);
        };
        const ExpSet l1 = local(X1, F1), l2 = local(X2, F2);
        std::map<std::uint32_t, std::uint32_t> pos1, pos2;
        for (std::uint32_t k = 0; k < F1.size(); ++k) pos1[F1[k]] = k;
        for (std::uint32_t k = 0; k < F2.size(); ++k) pos2[F2[k]] = k;
        EdgeSet le;
        for (const auto& [x, z] : fiber_edges) le.insert({pos1[x], pos2[z]});
        Ledger inner_ledger;
        const Derived in = audit_level(l1, l2, le, outer.delta1 / 2, *br.inner, inner_ledger, ctx, tag + "inner ");
        std::string why;
        if (!ledgers_agree(br.inner->ledger, inner_ledger, 1e-9, &why))
            ctx.fail(tag + "inner ledger disagrees: " + why);
        ell1 = in.swapped ? in.m2 : in.m1;
        ell2 = in.swapped ? in.m1 : in.m2;
        mbar1 = in.swapped ? in.a2bb : in.a1bb;
        mbar2 = in.swapped ? in.a1bb : in.a2bb;
        d3 = in.delta1;
        k10 = br.inner->g10.size();
        Kk = in.K0;
        Li = in.L;
        min_k = in.min_g10_fiber;
    }

    const double d1 = q(outer.delta1), dd3 = q(d3);
    const double lgl = lg(outer.L / d1);
    const double m1 = static_cast<double>(outer.m1), m2 = static_cast<double>(outer.m2);
    const double ell = static_cast<double>(ell1 * ell2), mb = static_cast<double>(mbar1 * mbar2);
    Ledger l;
    put(l, "3.62.1", static_cast<double>(mbar1), d1 * d1 * d1 / (lgl * lgl) * m1, ">", true);
    put(l, "3.62.2", static_cast<double>(mbar2), d1 * d1 * d1 / (lgl * lgl) * m2, ">", true);
    put(l, "3.63", static_cast<double>(max_inner),
        std::pow(static_cast<double>(outer.N1) * static_cast<double>(outer.N2), 0.25), "<", false);
    put(l, "3.64", static_cast<double>(min_k), dd3 * ell, ">=", false);
    put(l, "3.65", static_cast<double>(k10), d1 / (dd3 * std::pow(lgl, 4)) * mb / ell, ">", true);
    put(l, "3.66", Kk * Li, std::pow(d1, -3) * std::pow(lg(outer.L), 2) * outer.L, "<", true);
    return l;
}

}  // namespace

AuditReport audit_regularization(const ExpSet& a1, const ExpSet& a2, const BipartiteGraph& g, const Rational& delta,
                                 const RegularizationReport& report, std::uint64_t seed) {
    AuditReport out;
    std::mt19937_64 rng(seed);
    Ctx ctx{out, rng};
    EdgeSet E;
    for (const auto& e : g.edges()) E.insert(e);

    const Derived top = audit_level(a1, a2, E, delta, report.level, out.level, ctx, "");
    std::string why;
    if (!ledgers_agree(report.level.ledger, out.level, 1e-9, &why)) ctx.fail("level ledger disagrees: " + why);

    if (report.step7.size() != report.level.g10.size()) ctx.fail("step 7 does not cover every base pair");
    for (std::size_t k = 0; k < report.step7.size(); ++k) {
        const std::string tag = "base " + std::to_string(k) + ": ";
        out.step7.push_back(audit_base(a1, a2, E, top, report.step7[k], ctx, tag));
        if (!ledgers_agree(report.step7[k].ledger, out.step7.back(), 1e-9, &why))
            ctx.fail(tag + "step 7 ledger disagrees: " + why);
    }

    bool contained = !report.final_graph.empty();
    for (const auto& e : report.final_graph.edges())
        if (!E.count(e)) contained = false;
    out.containment_ok = contained;
    if (!contained) ctx.fail("final graph is empty or leaves the input graph");
    return out;
}

}  // namespace sumprod
