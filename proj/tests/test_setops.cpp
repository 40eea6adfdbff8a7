#include "doctest.h"
#include "oracles.hpp"

#include "sumprod/errors.hpp"
#include "sumprod/setops.hpp"

#include <cmath>
#include <random>
#include <sstream>

using namespace sumprod;

namespace {
oracle::Vec vec(const IntSet& s) { return s.values(); }
}  // namespace

TEST_CASE("iterated sumset examples") {
    CHECK(iterated_sumset(IntSet{1, 2}, 2) == IntSet{2, 3, 4});
    CHECK(iterated_sumset(IntSet{4, 9, 20}, 1) == IntSet{4, 9, 20});
    CHECK(iterated_sumset(IntSet{0, 1}, 3) == IntSet{0, 1, 2, 3});
}

TEST_CASE("sumsets agree with the set oracle") {
    std::mt19937_64 rng(5);
    for (int t = 0; t < 60; ++t) {
        const std::size_t n = 1 + rng() % 20;
        const std::int64_t range = t % 3 == 0 ? 50 : t % 3 == 1 ? 100000 : (std::int64_t{1} << 40);
        auto a = oracle::random_set(rng, n, -range, range);
        for (int k = 1; k <= 3; ++k) {
            auto want = oracle::ksum(a, k);
            auto got = iterated_sumset(IntSet(a), k);
            CHECK(got.values() == oracle::Vec(want.begin(), want.end()));
        }
    }
}

TEST_CASE("sumset size is affine invariant") {
    std::mt19937_64 rng(8);
    for (int t = 0; t < 20; ++t) {
        auto a = oracle::random_set(rng, 12, 0, 200);
        std::vector<std::int64_t> b;
        for (auto x : a) b.push_back(-7 * x + 13);
        CHECK(iterated_sumset(IntSet(a), 3).size() == iterated_sumset(IntSet(b), 3).size());
    }
}

TEST_CASE("budget is enforced") {
    std::mt19937_64 rng(1);
    auto a = oracle::random_set(rng, 60, 1, std::int64_t{1} << 50);
    CHECK_THROWS_AS(iterated_sumset(IntSet(a), 3, 1000), BudgetExceeded);
}

TEST_CASE("product sets") {
    CHECK(product_set(IntSet{2, 3}, 2).to_int_set() == IntSet{4, 6, 9});
    CHECK(product_set(IntSet{1, 2, 3, 6}, 2).size() == 9);
    auto p = product_set(IntSet{5}, 7);
    REQUIRE(p.size() == 1);
    CHECK(p.values()[0] == 78125);
    CHECK_THROWS_AS(product_set(IntSet{0, 3}, 2), NonPositiveElement);
}

TEST_CASE("product set size equals lattice sumset size") {
    std::mt19937_64 rng(9);
    for (int t = 0; t < 40; ++t) {
        auto a = oracle::random_set(rng, 1 + rng() % 12, 1, 5000);
        for (int k = 1; k <= 3; ++k) {
            const auto want = oracle::kprod(a, k).size();
            CHECK(product_set(IntSet(a), k).size() == want);
            auto emb = embed_set(IntSet(a).positive_values());
            CHECK(iterated_sumset(emb.set, k).size() == want);
        }
    }
}

TEST_CASE("graph sumsets and doubling constants") {
    const IntSet a{0, 1};
    CHECK(graph_sumset(a, a, BipartiteGraph::full(2, 2)) == IntSet{0, 1, 2});
    CHECK(graph_sumset(a, a, BipartiteGraph(2, 2, {{0, 0}})) == IntSet{0});
    CHECK(graph_sumset(a, a, BipartiteGraph(2, 2, {})).empty());
    CHECK(doubling_constant(a, a, BipartiteGraph::full(2, 2)) == doctest::Approx(1.5));
    CHECK(doubling_constant(a, a, BipartiteGraph(2, 2, {})) == 0);
    for (std::int64_t n : {3, 7, 20}) {
        std::vector<std::int64_t> v;
        for (std::int64_t i = 0; i < n; ++i) v.push_back(5 + 3 * i);
        const auto sz = static_cast<std::size_t>(n);
        CHECK(doubling_constant(IntSet(v), IntSet(v), BipartiteGraph::full(sz, sz)) ==
              doctest::Approx((2.0 * n - 1) / n));
    }
}

TEST_CASE("graph monotonicity and the density consequence") {
    std::mt19937_64 rng(21);
    for (int t = 0; t < 20; ++t) {
        auto a1 = IntSet(oracle::random_set(rng, 30, 0, 500));
        auto a2 = IntSet(oracle::random_set(rng, 20, 0, 500));
        std::vector<Edge> big, small;
        for (std::uint32_t i = 0; i < 30; ++i)
            for (std::uint32_t j = 0; j < 20; ++j)
                if (rng() % 2) {
                    big.emplace_back(i, j);
                    if (rng() % 2) small.emplace_back(i, j);
                }
        BipartiteGraph G(30, 20, big), H(30, 20, small);
        const auto sg = graph_sumset(a1, a2, G), sh = graph_sumset(a1, a2, H);
        for (auto x : sh) CHECK(sg.contains(x));
        CHECK(doubling_constant(a1, a2, H) <= doubling_constant(a1, a2, G));
        // N2 >= (delta / K)^2 N1 for any delta below the density
        const double delta = 0.999 * static_cast<double>(big.size()) / 600.0;
        const double K = doubling_constant(a1, a2, G);
        CHECK(20.0 >= std::pow(delta / K, 2) * 30.0);
    }
}

TEST_CASE("representation counts") {
    auto r = representation_counts(IntSet{1, 2}, 2);
    CHECK(r.at(3) == 2);
    auto one = representation_counts(IntSet{3, 8}, 1);
    CHECK(one.at(3) == 1);
    CHECK(one.at(4) == 0);
    auto r2 = representation_counts(IntSet{0, 1, 2}, 2);
    CHECK(r2.support == std::vector<std::int64_t>{0, 1, 2, 3, 4});
    std::vector<unsigned> want{1, 2, 3, 2, 1};
    for (std::size_t i = 0; i < 5; ++i) CHECK(r2.counts[i] == want[i]);
    std::ostringstream os;
    write_counts_csv(os, r2);
    CHECK(os.str().rfind("n,count\n0,1\n", 0) == 0);
}

TEST_CASE("engines agree with each other and with enumeration") {
    std::mt19937_64 rng(4);
    for (int t = 0; t < 30; ++t) {
        auto a = oracle::random_set(rng, 2 + rng() % 25, -300, 3000);
        for (int h = 1; h <= 3; ++h) {
            auto hs = representation_counts(IntSet(a), h, CountEngine::Hash);
            auto cv = representation_counts(IntSet(a), h, CountEngine::Convolution);
            CHECK(hs.support == cv.support);
            CHECK(hs.counts == cv.counts);
            auto want = oracle::reps(a, h);
            REQUIRE(hs.support.size() == want.size());
            std::size_t i = 0;
            for (const auto& [n, c] : want) {
                CHECK(hs.support[i] == n);
                CHECK(hs.counts[i] == c);
                ++i;
            }
        }
    }
}

TEST_CASE("large engine comparison") {
    std::mt19937_64 rng(44);
    auto a = oracle::random_set(rng, 2000, 0, 10'000'000);
    auto hs = representation_counts(IntSet(a), 2, CountEngine::Hash);
    auto cv = representation_counts(IntSet(a), 2, CountEngine::Convolution);
    CHECK(hs.counts == cv.counts);
    CHECK(hs.support == cv.support);
}

TEST_CASE("additive energy") {
    CHECK(additive_energy(IntSet{0, 1, 2}, 2) == 19);
    CHECK(oracle::quadruples({0, 1, 2}) == 19);
    std::mt19937_64 rng(2);
    for (int t = 0; t < 20; ++t) {
        auto a = oracle::random_set(rng, 1 + rng() % 15, 0, 1000);
        CHECK(additive_energy(IntSet(a), 1) == a.size());
        CHECK(additive_energy(IntSet(a), 2) == oracle::quadruples(a));
        CHECK(to_string(additive_energy(IntSet(a), 3)) == oracle::energy(a, 3).str());
        std::vector<std::int64_t> ap;
        for (std::size_t i = 0; i < a.size(); ++i) ap.push_back(static_cast<std::int64_t>(i));
        if (a.size() >= 4) CHECK(additive_energy(IntSet(ap), 2) >= additive_energy(IntSet(a), 2));
    }
}

TEST_CASE("energy bound on |hA|") {
    auto e = energy_sumset_bound(IntSet{0, 1, 2}, 2);
    CHECK(e.energy == 19);
    CHECK(e.sumset_size == 5);
    CHECK(e.lower_bound == doctest::Approx(81.0 / 19.0));
    CHECK(e.holds);
    auto one = energy_sumset_bound(IntSet{7}, 3);
    CHECK(one.lower_bound == doctest::Approx(1.0));
    CHECK(one.holds);
    std::mt19937_64 rng(6);
    CHECK(energy_sumset_bound(IntSet(oracle::random_set(rng, 100, 0, 999999)), 2).holds);
}

TEST_CASE("difference and quotient sets") {
    CHECK(difference_set(IntSet{0, 1, 3}) == IntSet{-3, -2, -1, 0, 1, 2, 3});
    CHECK(difference_set(IntSet{5}) == IntSet{0});
    auto q = quotient_set(IntSet{2, 4});
    CHECK(q.size() == 3);
    CHECK(q.basis.primes() == std::vector<std::uint64_t>{2});
    CHECK(q.elements == std::vector<std::vector<std::int64_t>>{{-1}, {0}, {1}});
}

TEST_CASE("ruzsa audit") {
    auto r = ruzsa_audit(IntSet{1, 2, 3, 6});
    CHECK(r.sumset_size == 9);
    CHECK(r.difference_size == 9);
    CHECK(r.holds);
    auto one = ruzsa_audit(IntSet{7});
    CHECK(one.difference_size == 1);
    CHECK(one.holds);
    // powers of 2 form an AP in one coordinate
    auto gp = ruzsa_audit(IntSet{1, 2, 4, 8, 16});
    CHECK(gp.difference_size == 9);
    CHECK(gp.holds);
}

TEST_CASE("growth csv") {
    std::vector<GrowthRow> rows{{1, 4, 4}, {2, 10, 9}};
    std::ostringstream os;
    write_growth_csv(os, rows);
    CHECK(os.str() == "k,sumset_size,productset_size\n1,4,4\n2,10,9\n");
}
