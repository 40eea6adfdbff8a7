#include "sumprod/regularize.hpp"

#include "sumprod/errors.hpp"
#include "sumprod/setops.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <map>

namespace sumprod {

// ------------------------------------------------------------------ ledger

void Ledger::add(std::string key, double lhs, double rhs, std::string relation, bool has_constant) {
    LedgerEntry e;
    e.key = std::move(key);
    e.lhs = lhs;
    e.rhs = rhs;
    e.relation = std::move(relation);
    e.has_constant = has_constant;
    e.ratio = lhs / rhs;
    const bool finite = std::isfinite(e.ratio);
    if (e.relation == "~") {
        e.pass = finite && e.ratio >= 0.25 && e.ratio <= 4.0;
    } else if (e.relation == ">" || e.relation == ">=") {
        if (has_constant)
            e.pass = finite && e.ratio > 0;
        else
            e.pass = e.relation == ">" ? lhs > rhs : lhs >= rhs;
    } else {
        if (has_constant)
            e.pass = finite;
        else
            e.pass = e.relation == "<" ? lhs < rhs : lhs <= rhs;
    }
    entries.push_back(std::move(e));
}

const LedgerEntry* Ledger::find(const std::string& key) const {
    for (const auto& e : entries)
        if (e.key == key) return &e;
    return nullptr;
}

bool Ledger::all_pass() const {
    return std::all_of(entries.begin(), entries.end(), [](const LedgerEntry& e) { return e.pass; });
}

namespace {

bool close(double a, double b, double tol) {
    if (std::isnan(a) || std::isnan(b)) return std::isnan(a) && std::isnan(b);
    if (std::isinf(a) || std::isinf(b)) return a == b;
    return std::abs(a - b) <= tol * std::max({1.0, std::abs(a), std::abs(b)});
}

}  // namespace

bool ledgers_agree(const Ledger& a, const Ledger& b, double tol, std::string* why) {
    auto fail = [&](const std::string& msg) {
        if (why) *why = msg;
        return false;
    };
    if (a.entries.size() != b.entries.size()) return fail("entry counts differ");
    for (std::size_t i = 0; i < a.entries.size(); ++i) {
        const auto& x = a.entries[i];
        const auto& y = b.entries[i];
        if (x.key != y.key) return fail("key " + x.key + " vs " + y.key);
        if (!close(x.lhs, y.lhs, tol)) return fail(x.key + ": lhs differs");
        if (!close(x.rhs, y.rhs, tol)) return fail(x.key + ": rhs differs");
        if (x.pass != y.pass) return fail(x.key + ": pass flag differs");
    }
    return true;
}

double floored_log(double x) { return std::max(std::log(x), 1.0); }

// ------------------------------------------------------------------ Step 1

namespace {

std::size_t count_into(std::span<const std::uint32_t> adj, const std::vector<char>& mark) {
    std::size_t c = 0;
    for (auto v : adj) c += static_cast<std::size_t>(mark[v]);
    return c;
}

std::vector<char> marks(std::size_t n, const IndexSet& s) {
    std::vector<char> m(n, 0);
    for (auto i : s) m[i] = 1;
    return m;
}

std::int64_t i64(std::size_t x) { return static_cast<std::int64_t>(x); }

}  // namespace

Ledger step1_ledger(const BipartiteGraph& g, const IndexSet& left, const IndexSet& right, const Rational& delta) {
    const auto in_left = marks(g.n_left(), left), in_right = marks(g.n_right(), right);
    const double d = to_double(delta);
    std::size_t min_row = SIZE_MAX, min_col = SIZE_MAX, inside = 0;
    for (auto i : left) {
        const auto c = count_into(g.row(i), in_right);
        min_row = std::min(min_row, c);
        inside += c;
    }
    for (auto j : right) min_col = std::min(min_col, count_into(g.column(j), in_left));
    const double n1 = static_cast<double>(left.size()), n2 = static_cast<double>(right.size());
    Ledger l;
    l.add("3.9", static_cast<double>(min_row), d / 4 * n2, ">", false);
    l.add("3.10", static_cast<double>(min_col), d / 4 * n1, ">", false);
    l.add("3.11", std::min(n1 / static_cast<double>(g.n_left()), n2 / static_cast<double>(g.n_right())), 0.75 * d,
          ">", false);
    const double total = static_cast<double>(g.n_left()) * static_cast<double>(g.n_right());
    l.add("3.12", static_cast<double>(g.edge_count() - inside), d / 4 * (total - n1 * n2), "<=", false);
    return l;
}

DensityRegularization step1_density_regularize(const BipartiteGraph& g, const Rational& delta) {
    const std::size_t N1 = g.n_left(), N2 = g.n_right();
    if (!exceeds(i64(g.edge_count()), delta, i64(N1 * N2)))
        throw DensityTooLow("|G| = " + std::to_string(g.edge_count()) + " is not above delta N1 N2");
    const Rational quarter = delta / 4;
    std::vector<char> alive1(N1, 1), alive2(N2, 1);
    std::vector<std::int64_t> deg1(N1), deg2(N2);
    for (std::size_t i = 0; i < N1; ++i) deg1[i] = i64(g.row_degree(i));
    for (std::size_t j = 0; j < N2; ++j) deg2[j] = i64(g.column_degree(j));
    std::int64_t n1 = i64(N1), n2 = i64(N2);

    DensityRegularization out;
    out.delta = delta;
    for (;;) {
        bool removed = false;
        for (std::size_t i = 0; i < N1 && !removed; ++i) {
            if (!alive1[i] || !at_most(deg1[i], quarter, n2)) continue;
            alive1[i] = 0;
            --n1;
            for (auto j : g.row(i))
                if (alive2[j]) --deg2[j];
            out.removed.push_back({1, static_cast<std::uint32_t>(i)});
            removed = true;
        }
        for (std::size_t j = 0; j < N2 && !removed; ++j) {
            if (!alive2[j] || !at_most(deg2[j], quarter, n1)) continue;
            alive2[j] = 0;
            --n2;
            for (auto i : g.column(j))
                if (alive1[i]) --deg1[i];
            out.removed.push_back({2, static_cast<std::uint32_t>(j)});
            removed = true;
        }
        if (!removed) break;
    }
    if (n1 == 0 || n2 == 0) throw EmptyAfterRegularization("density regularization removed a whole side");
    for (std::uint32_t i = 0; i < N1; ++i)
        if (alive1[i]) out.left.push_back(i);
    for (std::uint32_t j = 0; j < N2; ++j)
        if (alive2[j]) out.right.push_back(j);
    out.ledger = step1_ledger(g, out.left, out.right, delta);
    return out;
}

IndexSet fact1_extract(const IndexSet& e, const IndexSet& f, const BipartiteGraph& g, const Rational& alpha) {
    const auto in_e = marks(g.n_left(), e);
    std::vector<std::int64_t> hits(f.size());
    std::int64_t total = 0;
    for (std::size_t k = 0; k < f.size(); ++k) {
        hits[k] = i64(count_into(g.column(f[k]), in_e));
        total += hits[k];
    }
    if (!exceeds(total, alpha, i64(e.size() * f.size())))
        throw HypothesisFails("|G ∩ (E x F)| = " + std::to_string(total) + " is not above alpha |E||F|");
    const Rational half = alpha / 2;
    IndexSet out;
    for (std::size_t k = 0; k < f.size(); ++k)
        if (exceeds(hits[k], half, i64(e.size()))) out.push_back(f[k]);
    return out;
}

// ------------------------------------------------------------------ Step 2

std::vector<IndexSet> fibers(const ExpSet& s, const IndexSet& subset, std::size_t prefix) {
    std::vector<IndexSet> out;
    for (std::size_t k = 0; k < subset.size(); ++k) {
        const auto cur = s[subset[k]];
        bool fresh = k == 0;
        if (!fresh) {
            const auto prev = s[subset[k - 1]];
            fresh = !std::equal(cur.begin(), cur.begin() + static_cast<std::ptrdiff_t>(prefix), prev.begin());
        }
        if (fresh) out.emplace_back();
        out.back().push_back(subset[k]);
    }
    return out;
}

namespace {

int dyadic_class(std::size_t n) { return static_cast<int>(std::bit_width(n)) - 1; }

IndexSet all_indices(std::size_t n) {
    IndexSet all(n);
    for (std::uint32_t k = 0; k < n; ++k) all[k] = k;
    return all;
}

std::size_t max_fiber(const ExpSet& s, const IndexSet& subset, std::size_t prefix) {
    std::size_t best = 0;
    for (const auto& f : fibers(s, subset, prefix)) best = std::max(best, f.size());
    return best;
}

}  // namespace

FiberProfile fiber_profile(const ExpSet& a1, const IndexSet& s1, const ExpSet& a2, const IndexSet& s2) {
    if (a1.basis() != a2.basis()) throw InvalidArgument("fiber profile needs a shared basis");
    if (a1.dim() < 1) throw InvalidArgument("fiber profile needs at least one prime");
    FiberProfile p;
    for (std::size_t t = 0; t <= a1.dim(); ++t) {
        p.n1.push_back(max_fiber(a1, s1, t));
        p.n2.push_back(max_fiber(a2, s2, t));
    }
    p.split = choose_split(p);
    return p;
}

std::size_t choose_split(const FiberProfile& p) {
    using U = unsigned __int128;
    const U n = static_cast<U>(p.n1.at(0)) * p.n2.at(0);
    for (std::size_t t = p.n1.size(); t-- > 0;) {
        const U s = p.n1[t] + p.n2[t];
        if (s * s * s * s >= n) return t;
    }
    throw NoValidSplit("no prefix length brackets (N1 N2)^(1/4)");
}

// ------------------------------------------------------------------ dyadic

DyadicResult dyadic_fiber_regularize(const ExpSet& s, const IndexSet& subset, std::size_t prefix,
                                     const std::vector<double>& weights) {
    DyadicResult r;
    const auto fs = fibers(s, subset, prefix);
    std::map<int, double> mass;
    std::vector<double> fw(fs.size(), 0);
    for (std::size_t k = 0; k < fs.size(); ++k) {
        if (weights.empty())
            fw[k] = static_cast<double>(fs[k].size());
        else
            for (auto i : fs[k]) fw[k] += weights.at(i);
        mass[dyadic_class(fs[k].size())] += fw[k];
        r.total += fw[k];
        r.max_fiber = std::max(r.max_fiber, fs[k].size());
    }
    r.classes = mass.size();
    if (fs.empty()) return r;
    int best = mass.begin()->first;
    for (const auto& [j, w] : mass)
        if (w > mass[best]) best = j;
    r.m = std::size_t{1} << best;
    for (std::size_t k = 0; k < fs.size(); ++k) {
        if (dyadic_class(fs[k].size()) != best) continue;
        r.kept.insert(r.kept.end(), fs[k].begin(), fs[k].end());
        r.retained += fw[k];
        ++r.fibers_kept;
    }
    return r;
}

// ------------------------------------------------------------------ Steps 3-5

namespace {

IndexSet big_fibers(const ExpSet& s, const IndexSet& subset, std::size_t prefix, double threshold) {
    IndexSet out;
    for (const auto& f : fibers(s, subset, prefix))
        if (static_cast<double>(f.size()) > threshold) out.insert(out.end(), f.begin(), f.end());
    return out;
}

std::vector<std::uint32_t> fiber_ids(std::size_t n, const std::vector<IndexSet>& fs) {
    std::vector<std::uint32_t> id(n, UINT32_MAX);
    for (std::uint32_t k = 0; k < fs.size(); ++k)
        for (auto i : fs[k]) id[i] = k;
    return id;
}

std::size_t sum_count(const ExpSet& a1, const ExpSet& a2, const std::vector<Edge>& edges) {
    std::vector<ExponentVector> sums;
    sums.reserve(edges.size());
    for (const auto& [l, r] : edges) {
        ExponentVector v(a1.dim());
        for (std::size_t c = 0; c < a1.dim(); ++c) v[c] = a1[l][c] + a2[r][c];
        sums.push_back(std::move(v));
    }
    std::sort(sums.begin(), sums.end());
    return static_cast<std::size_t>(std::unique(sums.begin(), sums.end()) - sums.begin());
}

// Picks the dyadic class (floor log2 of `key`) of largest `score`; ties go
// to the smaller class.
template <class Score>
std::vector<std::size_t> dyadic_pick(const std::vector<std::size_t>& key, Score score) {
    std::map<int, double> total;
    for (std::size_t k = 0; k < key.size(); ++k) total[dyadic_class(key[k])] += score(k);
    int best = total.begin()->first;
    for (const auto& [j, w] : total)
        if (w > total[best]) best = j;
    std::vector<std::size_t> out;
    for (std::size_t k = 0; k < key.size(); ++k)
        if (dyadic_class(key[k]) == best) out.push_back(k);
    return out;
}

struct Frame {
    const ExpSet* a1;
    const ExpSet* a2;
    BipartiteGraph g;
};

Frame orient(const ExpSet& a1, const ExpSet& a2, const BipartiteGraph& g, bool swapped) {
    if (swapped) return {&a2, &a1, g.transpose()};
    return {&a1, &a2, g};
}

void level_ledger(LevelReport& r, const Frame& f) {
    const double d = to_double(r.delta), K = r.K;
    const double N1 = static_cast<double>(r.N1), N2 = static_cast<double>(r.N2);
    const double quarter_root = std::pow(N1 * N2, 0.25);
    const double lg = floored_log(K / d);
    const double nn1 = static_cast<double>(r.a1_bbar.size()), nn2 = static_cast<double>(r.a2_bbar.size());
    const double m1 = static_cast<double>(r.m1), m2 = static_cast<double>(r.m2);
    const double M1 = static_cast<double>(r.M1), M2 = static_cast<double>(r.M2);

    Ledger& l = r.ledger;
    l = step1_ledger(f.g, r.step1.left, r.step1.right, r.delta);
    l.add("3.16", static_cast<double>(r.a2_dprime.size()), d / 8 * static_cast<double>(r.step1.right.size()), ">",
          false);
    l.add("3.21", m2, static_cast<double>(r.profile.n1[r.split]), "<=", false);
    l.add("3.24", nn2, std::pow(d, 3) / lg * N2, ">", true);
    l.add("3.24'", nn2, M2 * m2, "~", false);
    l.add("3.25m", m2, std::pow(d, 5) / (K * K) * quarter_root, ">", true);
    l.add("3.25", M2, std::pow(d, -5) * K * K * N2 / quarter_root, "<", true);
    l.add("3.31'", nn1, M1 * m1, "~", false);
    l.add("3.33", nn1, d * d / (lg * lg) * N1, ">", true);

    const auto in2 = marks(f.g.n_right(), r.a2_bbar);
    std::size_t cross = 0;
    for (auto i : r.a1_bbar) cross += count_into(f.g.row(i), in2);
    l.add("3.34", static_cast<double>(cross), d / (lg * lg) * nn1 * nn2, ">", true);
    l.add("3.35m", m1, std::pow(d, 10) * std::pow(K, -5) * quarter_root, ">", true);
    l.add("3.35", M1, std::pow(d, -10) * std::pow(K, 5) * N1 / quarter_root, "<", true);

    const double d1 = to_double(r.delta1), d0 = to_double(r.delta0);
    l.add("3.38", d1, d / (lg * lg), ">", true);
    l.add("3.44", static_cast<double>(r.g10.size()), static_cast<double>(r.g1_dprime.size()) / lg, ">", false);
    l.add("3.45", d0, d / (d1 * std::pow(lg, 4)), ">", true);
    l.add("3.47", r.K0 * r.L, std::pow(d, -2.5) * std::pow(lg, 1.5) * K, "<", true);
    l.add("3.50", static_cast<double>(r.g_tilde.size()), d / std::pow(lg, 4) * nn1 * nn2, ">", true);
    l.add("3.51", nn1 * nn2, std::pow(d, 5) / std::pow(lg, 3) * N1 * N2, ">", false);
}

void step5(LevelReport& r, const Frame& f) {
    const ExpSet& a1 = *f.a1;
    const ExpSet& a2 = *f.a2;
    r.fibers1 = fibers(a1, r.a1_bbar, r.split);
    r.fibers2 = fibers(a2, r.a2_bbar, r.split);
    const auto id1 = fiber_ids(a1.size(), r.fibers1), id2 = fiber_ids(a2.size(), r.fibers2);

    std::map<BasePair, std::vector<Edge>> fiber_edges;
    for (const auto& [l, rr] : f.g.edges())
        if (id1[l] != UINT32_MAX && id2[rr] != UINT32_MAX) fiber_edges[{id1[l], id2[rr]}].push_back({l, rr});
    if (fiber_edges.empty()) throw EmptyAfterRegularization("no edges between the regular sets");

    // The fiber-density cutoff carries an unspecified constant; every base
    // pair with fiber edges is kept.
    std::vector<std::size_t> e;
    for (const auto& [bp, edges] : fiber_edges) {
        r.g1.push_back(bp);
        e.push_back(edges.size());
    }
    auto chosen = dyadic_pick(e, [&](std::size_t k) { return static_cast<double>(e[k]); });
    bool first = true;
    for (auto k : chosen) {
        const auto& bp = r.g1[k];
        r.g1_prime.push_back(bp);
        const Rational dens(static_cast<std::int64_t>(e[k]),
                            static_cast<std::int64_t>(r.fibers1[bp.first].size() * r.fibers2[bp.second].size()));
        if (first || dens < r.delta1) r.delta1 = dens;
        first = false;
    }

    const double d = to_double(r.delta), lg = floored_log(r.K / d);
    const double root_m = std::sqrt(static_cast<double>(r.m1) * static_cast<double>(r.m2));
    r.L0 = std::pow(lg, 4.5) * std::pow(d, -4.5) * r.K;
    std::vector<std::size_t> s_all;
    for (const auto& bp : r.g1_prime) s_all.push_back(sum_count(a1, a2, fiber_edges[bp]));
    std::vector<std::size_t> s;
    for (std::size_t k = 0; k < r.g1_prime.size(); ++k) {
        if (static_cast<double>(s_all[k]) < r.L0 * root_m) {
            r.g1_dprime.push_back(r.g1_prime[k]);
            s.push_back(s_all[k]);
        }
    }
    if (r.g1_dprime.empty()) {
        r.l0_cutoff_applied = false;
        r.g1_dprime = r.g1_prime;
        s = s_all;
    }
    chosen = dyadic_pick(s, [](std::size_t) { return 1.0; });
    std::size_t min_s = SIZE_MAX;
    for (auto k : chosen) {
        r.g10.push_back(r.g1_dprime[k]);
        min_s = std::min(min_s, s[k]);
    }
    r.L = static_cast<double>(min_s) / root_m;
    r.delta0 = Rational(static_cast<std::int64_t>(r.g10.size()), static_cast<std::int64_t>(r.M1 * r.M2));

    std::vector<ExponentVector> prefix_sums;
    for (const auto& bp : r.g10) {
        const auto x1 = a1[r.fibers1[bp.first].front()], x2 = a2[r.fibers2[bp.second].front()];
        ExponentVector v(r.split);
        for (std::size_t c = 0; c < r.split; ++c) v[c] = x1[c] + x2[c];
        prefix_sums.push_back(std::move(v));
        const auto& fe = fiber_edges[bp];
        r.g_tilde.insert(r.g_tilde.end(), fe.begin(), fe.end());
    }
    std::sort(prefix_sums.begin(), prefix_sums.end());
    const auto distinct = std::unique(prefix_sums.begin(), prefix_sums.end()) - prefix_sums.begin();
    r.K0 = static_cast<double>(distinct) / std::sqrt(static_cast<double>(r.M1) * static_cast<double>(r.M2));
    std::sort(r.g_tilde.begin(), r.g_tilde.end());
}

}  // namespace

LevelReport regularize_level(const ExpSet& a1_in, const ExpSet& a2_in, const BipartiteGraph& g_in,
                             const Rational& delta, std::optional<std::size_t> forced_split) {
    if (a1_in.basis() != a2_in.basis()) throw InvalidArgument("regularization needs a shared basis");
    if (g_in.n_left() != a1_in.size() || g_in.n_right() != a2_in.size())
        throw InvalidArgument("graph does not match the set sizes");
    if (delta <= Rational(0) || delta > Rational(1)) throw InvalidArgument("delta must lie in (0, 1]");
    if (forced_split && *forced_split > a1_in.dim()) throw InvalidArgument("split exceeds the basis size");

    LevelReport r;
    r.delta = delta;
    r.step1 = step1_density_regularize(g_in, delta);
    r.profile = fiber_profile(a1_in, r.step1.left, a2_in, r.step1.right);
    r.forced_split = forced_split.has_value();
    r.split = forced_split ? *forced_split : r.profile.split;
    if (r.profile.n2[r.split] > r.profile.n1[r.split]) {
        r.swapped = true;
        std::swap(r.step1.left, r.step1.right);
        for (auto& rem : r.step1.removed) rem.side = 3 - rem.side;
        std::swap(r.profile.n1, r.profile.n2);
    }
    const Frame f = orient(a1_in, a2_in, g_in, r.swapped);
    const ExpSet& a1 = *f.a1;
    const ExpSet& a2 = *f.a2;
    r.N1 = a1.size();
    r.N2 = a2.size();
    r.K = doubling_constant(a1, a2, f.g);
    r.step1.ledger = step1_ledger(f.g, r.step1.left, r.step1.right, delta);

    const double d = to_double(delta);
    const double K = r.K;

    // Step 3: the largest fiber of A1' drives the choice of A2''.
    const auto f1 = fibers(a1, r.step1.left, r.split);
    for (std::uint32_t k = 0; k < f1.size(); ++k)
        if (f1[k].size() > f1[r.xbar_fiber].size()) r.xbar_fiber = k;
    r.xbar_elements = f1[r.xbar_fiber];
    r.a2_dprime = fact1_extract(r.xbar_elements, r.step1.right, f.g, delta / 4);
    const double n1t = static_cast<double>(r.profile.n1[r.split]);
    r.a2_bar = big_fibers(a2, r.a2_dprime, r.split, 1e-4 * std::pow(d, 5) / (K * K) * n1t);
    const auto in_a1p = marks(a1.size(), r.step1.left);
    std::vector<double> w2(a2.size(), 0);
    for (auto z : r.a2_bar) w2[z] = static_cast<double>(count_into(f.g.column(z), in_a1p));
    r.dyadic2 = dyadic_fiber_regularize(a2, r.a2_bar, r.split, w2);
    r.a2_bbar = r.dyadic2.kept;
    r.m2 = r.dyadic2.m;
    r.M2 = r.dyadic2.fibers_kept;
    if (r.a2_bbar.empty()) throw EmptyAfterRegularization("no fiber of A2'' survives the size cutoff");

    // Step 4.
    r.a1_bar = big_fibers(a1, r.step1.left, r.split, std::pow(d, 5) * std::pow(K, -3) * static_cast<double>(r.m2));
    const auto in_a2bb = marks(a2.size(), r.a2_bbar);
    std::vector<double> w1(a1.size(), 0);
    for (auto x : r.a1_bar) w1[x] = static_cast<double>(count_into(f.g.row(x), in_a2bb));
    r.dyadic1 = dyadic_fiber_regularize(a1, r.a1_bar, r.split, w1);
    r.a1_bbar = r.dyadic1.kept;
    r.m1 = r.dyadic1.m;
    r.M1 = r.dyadic1.fibers_kept;
    if (r.a1_bbar.empty()) throw EmptyAfterRegularization("no fiber of A1' survives the size cutoff");

    step5(r, f);
    level_ledger(r, f);
    return r;
}

// ------------------------------------------------------------------ Step 7

BaseRefinement step7_refine(const ExpSet& a1_in, const ExpSet& a2_in, const BipartiteGraph& g_in,
                            const LevelReport& level, const BasePair& base) {
    const Frame f = orient(a1_in, a2_in, g_in, level.swapped);
    const ExpSet& a1 = *f.a1;
    const ExpSet& a2 = *f.a2;
    const IndexSet& F1 = level.fibers1.at(base.first);
    const IndexSet& F2 = level.fibers2.at(base.second);
    const std::size_t tail = a1.dim() - level.split;

    // Local graph of the fiber pair, over local indices.
    std::vector<Edge> local;
    for (std::uint32_t i = 0; i < F1.size(); ++i)
        for (std::uint32_t j = 0; j < F2.size(); ++j)
            if (f.g.has_edge(F1[i], F2[j])) local.emplace_back(i, j);
    const BipartiteGraph kg(F1.size(), F2.size(), local);

    BaseRefinement br;
    br.base = base;
    br.mbar1 = F1.size();
    br.mbar2 = F2.size();
    std::size_t min_k_fiber = 1;

    if (tail <= 1) {
        // Inner fibers are single points; the projected graph is its own
        // regular form.
        br.degenerate = true;
        br.max_inner_fiber = 1;
        br.k10_size = kg.edge_count();
        br.L_inner = 1;
        if (tail == 0) {
            br.K_k10 = 1;
        } else {
            std::vector<std::size_t> idx{level.split};
            const ExpSet l1 = project(a1.subset(std::vector<std::size_t>(F1.begin(), F1.end())), idx);
            const ExpSet l2 = project(a2.subset(std::vector<std::size_t>(F2.begin(), F2.end())), idx);
            br.K_k10 = doubling_constant(l1, l2, kg);
        }
        for (const auto& [i, j] : kg.edges()) br.k_tilde.emplace_back(F1[i], F2[j]);
    } else {
        std::vector<std::size_t> idx;
        for (std::size_t c = level.split; c < a1.dim(); ++c) idx.push_back(c);
        const ExpSet l1 = project(a1.subset(std::vector<std::size_t>(F1.begin(), F1.end())), idx);
        const ExpSet l2 = project(a2.subset(std::vector<std::size_t>(F2.begin(), F2.end())), idx);
        auto inner = std::make_shared<LevelReport>(regularize_level(l1, l2, kg, level.delta1 / 2, 1));
        const bool sw = inner->swapped;
        br.ell1 = sw ? inner->m2 : inner->m1;
        br.ell2 = sw ? inner->m1 : inner->m2;
        br.mbar1 = sw ? inner->a2_bbar.size() : inner->a1_bbar.size();
        br.mbar2 = sw ? inner->a1_bbar.size() : inner->a2_bbar.size();
        br.max_inner_fiber = std::max(max_fiber(l1, all_indices(l1.size()), 1), max_fiber(l2, all_indices(l2.size()), 1));
        br.delta3 = inner->delta1;
        br.k10_size = inner->g10.size();
        br.K_k10 = inner->K0;
        br.L_inner = inner->L;
        for (auto [i, j] : inner->g_tilde) {
            if (sw) std::swap(i, j);
            br.k_tilde.emplace_back(F1[i], F2[j]);
        }
        std::sort(br.k_tilde.begin(), br.k_tilde.end());
        // Smallest fiber graph over the inner base pairs.
        min_k_fiber = SIZE_MAX;
        std::map<BasePair, std::size_t> per;
        const auto id1 = fiber_ids(sw ? l2.size() : l1.size(), inner->fibers1);
        const auto id2 = fiber_ids(sw ? l1.size() : l2.size(), inner->fibers2);
        for (const auto& [i, j] : inner->g_tilde) ++per[{id1[i], id2[j]}];
        for (const auto& [bp, c] : per) min_k_fiber = std::min(min_k_fiber, c);
        br.inner = std::move(inner);
    }

    const double d1 = to_double(level.delta1), d3 = to_double(br.delta3);
    const double lgl = floored_log(level.L / d1);
    const double m1 = static_cast<double>(level.m1), m2 = static_cast<double>(level.m2);
    const double ell = static_cast<double>(br.ell1) * static_cast<double>(br.ell2);
    const double mb = static_cast<double>(br.mbar1) * static_cast<double>(br.mbar2);
    Ledger& l = br.ledger;
    l.add("3.62.1", static_cast<double>(br.mbar1), std::pow(d1, 3) / (lgl * lgl) * m1, ">", true);
    l.add("3.62.2", static_cast<double>(br.mbar2), std::pow(d1, 3) / (lgl * lgl) * m2, ">", true);
    l.add("3.63", static_cast<double>(br.max_inner_fiber),
          std::pow(static_cast<double>(level.N1) * static_cast<double>(level.N2), 0.25), "<", false);
    l.add("3.64", static_cast<double>(min_k_fiber), d3 * ell, ">=", false);
    l.add("3.65", static_cast<double>(br.k10_size), d1 / (d3 * std::pow(lgl, 4)) * mb / ell, ">", true);
    l.add("3.66", br.K_k10 * br.L_inner, std::pow(d1, -3) * std::pow(floored_log(level.L), 2) * level.L, "<", true);
    return br;
}

RegularizationReport regularize(const ExpSet& a1, const ExpSet& a2, const BipartiteGraph& g, const Rational& delta) {
    RegularizationReport rep;
    rep.level = regularize_level(a1, a2, g, delta);
    std::vector<Edge> final_edges;
    for (const auto& bp : rep.level.g10) {
        rep.step7.push_back(step7_refine(a1, a2, g, rep.level, bp));
        for (auto [l, r] : rep.step7.back().k_tilde) {
            if (rep.level.swapped) std::swap(l, r);
            final_edges.emplace_back(l, r);
        }
    }
    rep.final_graph = BipartiteGraph(g.n_left(), g.n_right(), std::move(final_edges));
    rep.contained = !rep.final_graph.empty() && rep.final_graph.is_subgraph_of(g);
    return rep;
}

}  // namespace sumprod
