#include "doctest.h"
#include "oracles.hpp"

#include "sumprod/errors.hpp"
#include "sumprod/harness.hpp"
#include "sumprod/regularize.hpp"

#include <cmath>
#include <map>
#include <random>

using namespace sumprod;

namespace {

ExpSet grid_set(std::uint32_t side) {
    std::vector<ExponentVector> v;
    for (std::uint32_t i = 0; i < side; ++i)
        for (std::uint32_t j = 0; j < side; ++j) v.push_back({i, j});
    return ExpSet(PrimeBasis({2, 3}), v);
}

ExpSet powers_of_two(std::uint32_t n) {
    std::vector<ExponentVector> v;
    for (std::uint32_t i = 0; i < n; ++i) v.push_back({i});
    return ExpSet(PrimeBasis({2}), v);
}

IndexSet iota(std::uint32_t n) {
    IndexSet s(n);
    for (std::uint32_t i = 0; i < n; ++i) s[i] = i;
    return s;
}

// Exhaustive row and column scan of the step-1 output.
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
    return true;
}

}  // namespace

TEST_CASE("step 1 on full and nearly full graphs") {
    auto full = BipartiteGraph::full(8, 8);
    auto d = step1_density_regularize(full, Rational(1, 2));
    CHECK(d.left.size() == 8);
    CHECK(d.right.size() == 8);
    CHECK(d.removed.empty());
    CHECK(d.ledger.all_pass());

    std::vector<Edge> e;
    for (std::uint32_t i = 1; i < 8; ++i)
        for (std::uint32_t j = 0; j < 8; ++j) e.emplace_back(i, j);
    auto g = BipartiteGraph(8, 8, e);
    auto d2 = step1_density_regularize(g, Rational(1, 2));
    CHECK(d2.left == IndexSet{1, 2, 3, 4, 5, 6, 7});
    CHECK(d2.right.size() == 8);
    REQUIRE(d2.removed.size() == 1);
    CHECK(d2.removed[0].side == 1);
    CHECK(d2.removed[0].index == 0);

    CHECK_THROWS_AS(step1_density_regularize(BipartiteGraph(4, 4, {{0, 0}}), Rational(1, 2)), DensityTooLow);
}

TEST_CASE("step 1 on random graphs passes the exhaustive scan") {
    std::mt19937_64 rng(31);
    for (int t = 0; t < 10; ++t) {
        std::vector<Edge> e;
        for (std::uint32_t i = 0; i < 64; ++i)
            for (std::uint32_t j = 0; j < 64; ++j)
                if (rng() % 100 < 45) e.emplace_back(i, j);
        BipartiteGraph g(64, 64, e);
        auto d = step1_density_regularize(g, Rational(3, 10));
        CHECK(scan_ok(g, d));
        CHECK(d.left.size() * 1000 > 225 * 64);
        CHECK(d.right.size() * 1000 > 225 * 64);
        CHECK(d.ledger.all_pass());
    }
}

TEST_CASE("fact 1 extraction") {
    auto full = BipartiteGraph::full(6, 6);
    CHECK(fact1_extract(iota(6), iota(6), full, Rational(1, 2)) == iota(6));

    std::vector<Edge> e;
    for (std::uint32_t i = 0; i < 6; ++i)
        for (std::uint32_t j = 0; j < 3; ++j) e.emplace_back(i, j);
    CHECK(fact1_extract(iota(6), iota(6), BipartiteGraph(6, 6, e), Rational(49, 100)) == IndexSet{0, 1, 2});
    CHECK_THROWS_AS(fact1_extract(iota(6), iota(6), BipartiteGraph(6, 6, e), Rational(1, 2)), HypothesisFails);

    std::mt19937_64 rng(8);
    std::vector<Edge> r;
    for (std::uint32_t i = 0; i < 40; ++i)
        for (std::uint32_t j = 0; j < 40; ++j)
            if (rng() % 3 == 0) r.emplace_back(i, j);
    BipartiteGraph g(40, 40, r);
    const Rational alpha(static_cast<std::int64_t>(r.size()), 2 * 1600);
    auto f = fact1_extract(iota(40), iota(40), g, alpha);
    for (std::uint32_t z = 0; z < 40; ++z) {
        const auto deg = static_cast<std::int64_t>(g.column_degree(z));
        const bool in = std::find(f.begin(), f.end(), z) != f.end();
        CHECK(in == exceeds(deg, alpha / 2, 40));
    }
}

TEST_CASE("fiber profile and split") {
    auto s = powers_of_two(16);
    auto p = fiber_profile(s, iota(16), s, iota(16));
    CHECK(p.n1 == std::vector<std::size_t>{16, 1});
    CHECK(choose_split(p) == 0);

    auto g = grid_set(4);
    auto pg = fiber_profile(g, iota(16), g, iota(16));
    CHECK(pg.n1 == std::vector<std::size_t>{16, 4, 1});
    // (4 + 4)^4 >= 256, (1 + 1)^4 < 256
    CHECK(choose_split(pg) == 1);
}

TEST_CASE("dyadic fiber regularization") {
    auto g = grid_set(5);
    auto d = dyadic_fiber_regularize(g, iota(25), 1);
    CHECK(d.m == 4);
    CHECK(d.kept.size() == 25);
    CHECK(d.retained == d.total);

    // fibers of sizes 1, 2, 4, 8 over the first coordinate
    std::vector<ExponentVector> v;
    const std::uint32_t sizes[] = {1, 2, 4, 8};
    for (std::uint32_t x = 0; x < 4; ++x)
        for (std::uint32_t y = 0; y < sizes[x]; ++y) v.push_back({x, y});
    ExpSet s(PrimeBasis({2, 3}), v);
    std::vector<double> w(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) w[i] = 1.0 / sizes[s[i][0]];
    auto e = dyadic_fiber_regularize(s, iota(static_cast<std::uint32_t>(s.size())), 1, w);
    CHECK(e.classes == 4);
    CHECK(e.retained / e.total >= 0.25 - 1e-12);
    CHECK(e.m == 1);  // ties go to the smaller class

    std::mt19937_64 rng(5);
    for (int t = 0; t < 10; ++t) {
        auto inst = random_regularization_instance(100, 3, Rational(1, 2), rng());
        auto r = dyadic_fiber_regularize(inst.a1, iota(100), 1);
        CHECK(r.retained / r.total >= 1.0 / (std::log2(static_cast<double>(r.max_fiber)) + 1) - 1e-12);
    }
}

TEST_CASE("full graph on a product grid") {
    auto g = grid_set(4);
    auto full = BipartiteGraph::full(16, 16);
    auto lvl = regularize_level(g, g, full, Rational(1, 2));
    CHECK(lvl.split == 1);
    CHECK(lvl.dyadic1.classes == 1);
    CHECK(lvl.dyadic2.classes == 1);
    CHECK(lvl.g10.size() == 16);
    CHECK(lvl.delta1 == Rational(1));
    CHECK(lvl.ledger.all_pass());
}

TEST_CASE("single tail coordinate gives a degenerate refinement") {
    auto g = grid_set(4);
    auto rep = regularize(g, g, BipartiteGraph::full(16, 16), Rational(1, 2));
    REQUIRE(!rep.step7.empty());
    for (const auto& s : rep.step7) {
        CHECK(s.degenerate);
        CHECK(s.ell1 == 1);
        CHECK(s.ell2 == 1);
    }
    CHECK(rep.contained);
}

TEST_CASE("random instances: ledger, audit and containment") {
    for (int t = 0; t < 6; ++t) {
        const Rational deltas[] = {Rational(1, 10), Rational(3, 10), Rational(1, 2)};
        auto inst = random_regularization_instance(96, 4, deltas[t % 3], 100 + t);
        auto rep = regularize(inst.a1, inst.a2, inst.g, inst.delta);
        auto au = audit_regularization(inst.a1, inst.a2, inst.g, inst.delta, rep, 7);
        CHECK(au.ok());
        CHECK(rep.contained);
        CHECK(ledgers_agree(rep.level.ledger, au.level));
        for (const auto& e : rep.level.ledger.entries)
            if (e.has_constant && (e.relation == ">" || e.relation == ">=")) CHECK(e.ratio > 0);
        const double N = 96.0 * 96.0;
        for (const auto& s : rep.step7)
            CHECK(static_cast<double>(s.ell1 * s.ell2) <=
                  std::min(static_cast<double>(rep.level.m1 * rep.level.m2), std::sqrt(N)) + 1e-9);
        CHECK(scan_ok(rep.level.swapped ? inst.g.transpose() : inst.g, rep.level.step1));
    }
}

TEST_CASE("ledger pass rule") {
    Ledger l;
    l.add("a", 2, 1, ">", false);
    l.add("b", 1, 2, ">", false);
    l.add("c", 1, 1e9, ">", true);
    l.add("d", 3, 1, "~", false);
    l.add("e", 5, 1, "~", false);
    l.add("f", 1, 0, "<=", true);
    CHECK(l.find("a")->pass);
    CHECK_FALSE(l.find("b")->pass);
    CHECK(l.find("c")->pass);
    CHECK(l.find("d")->pass);
    CHECK_FALSE(l.find("e")->pass);
    CHECK_FALSE(l.find("f")->pass);
    CHECK(floored_log(2.0) == 1.0);
    CHECK(floored_log(100.0) == doctest::Approx(std::log(100.0)));
}

TEST_CASE("bsg extraction") {
    IntSet a{1, 2, 3, 4, 5, 6, 7, 8};
    auto full = bsg_extract(a, BipartiteGraph::full(8, 8), Rational(1, 2));
    CHECK(full.subset.size() == 8);
    CHECK(full.delta_prime == 1.0);

    std::vector<Edge> e;
    for (std::uint32_t i = 0; i < 4; ++i)
        for (std::uint32_t j = 0; j < 4; ++j) {
            e.emplace_back(i, j);
            e.emplace_back(i + 4, j + 4);
        }
    auto two = bsg_extract(a, BipartiteGraph(8, 8, e), Rational(1, 4));
    const bool low = std::all_of(two.subset.begin(), two.subset.end(), [](auto x) { return x < 4; });
    const bool high = std::all_of(two.subset.begin(), two.subset.end(), [](auto x) { return x >= 4; });
    CHECK((low || high));
    CHECK(two.edge_fraction >= 0.125);

    std::mt19937_64 rng(2);
    std::vector<std::int64_t> ap;
    for (int i = 0; i < 40; ++i) ap.push_back(3 + 5 * i);
    std::vector<Edge> r;
    for (std::uint32_t i = 0; i < 40; ++i)
        for (std::uint32_t j = 0; j < 40; ++j)
            if (rng() % 10 < 7) r.emplace_back(i, j);
    auto rep = bsg_extract(IntSet(ap), BipartiteGraph(40, 40, r), Rational(1, 2));
    CHECK(rep.k_prime <= 2.0);
}

TEST_CASE("freiman dimension and coordinates") {
    CHECK(freiman_dimension(ExpSet(PrimeBasis({2, 3}), {{0, 0}, {1, 0}, {0, 1}})) == 2);
    CHECK(freiman_dimension(ExpSet(PrimeBasis({2, 3}), {{4, 1}})) == 0);
    std::vector<ExponentVector> line;
    for (std::uint32_t i = 0; i < 10; ++i) line.push_back({i, 2 * i});
    CHECK(freiman_dimension(ExpSet(PrimeBasis({2, 3}), line)) == 1);

    CHECK(select_injective_coords(ExpSet(PrimeBasis({2, 3}), {{0, 5}, {1, 5}, {2, 6}})) ==
          std::vector<std::size_t>{0});
    CHECK(select_injective_coords(ExpSet(PrimeBasis({2, 3, 5}), {{0, 0, 1}, {0, 1, 0}, {0, 1, 1}})) ==
          std::vector<std::size_t>{1, 2});
    CHECK(select_injective_coords(ExpSet(PrimeBasis({2, 3, 5}), {{3, 1, 4}})) == std::vector<std::size_t>{0});

    std::mt19937_64 rng(77);
    const std::vector<std::uint64_t> primes{2, 3, 5, 7, 11};
    for (int t = 0; t < 40; ++t) {
        const std::size_t dim = 1 + rng() % 5;
        auto v = oracle::random_vectors(rng, 1 + rng() % 20, dim, 3);
        ExpSet s(PrimeBasis(std::vector<std::uint64_t>(primes.begin(), primes.begin() + static_cast<long>(dim))),
                 std::vector<ExponentVector>(v.begin(), v.end()));
        std::vector<std::vector<oracle::cpp_int>> m;
        for (std::size_t i = 1; i < v.size(); ++i) {
            std::vector<oracle::cpp_int> row;
            for (std::size_t j = 0; j < dim; ++j) row.push_back(oracle::cpp_int(v[i][j]) - v[0][j]);
            m.push_back(row);
        }
        CHECK(freiman_dimension(s) == oracle::bareiss_rank(m));

        auto keep = select_injective_coords(s);
        CHECK(is_injective_on(s, keep));
        for (std::size_t drop = 0; drop < keep.size(); ++drop) {
            auto fewer = keep;
            fewer.erase(fewer.begin() + static_cast<long>(drop));
            if (!fewer.empty()) CHECK_FALSE(is_injective_on(s, fewer));
        }
    }
}

TEST_CASE("freiman audit forms") {
    std::vector<ExponentVector> ap;
    for (std::uint32_t i = 0; i < 6; ++i) ap.push_back({i});
    auto a = freiman_audit(ExpSet(PrimeBasis({2}), ap));
    CHECK(a.dimension == 1);
    CHECK(a.ceil_holds);
    CHECK_FALSE(a.naive_holds);
    CHECK(a.pass);

    auto sq = freiman_audit(ExpSet(PrimeBasis({2, 3}), {{0, 0}, {0, 1}, {1, 0}, {1, 1}}));
    CHECK(sq.dimension == 2);
    CHECK(sq.sumset_size == 9);
    CHECK(sq.doubling == doctest::Approx(2.25));
    CHECK_FALSE(sq.naive_holds);
    CHECK(sq.relaxed_holds);
    CHECK(sq.relaxed_margin == doctest::Approx(0.5));
    CHECK(sq.pass);

    auto one = freiman_audit(ExpSet(PrimeBasis({2}), {{3}}));
    CHECK(one.dimension == 0);
    CHECK(one.pass);
}
