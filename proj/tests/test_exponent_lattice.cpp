#include "doctest.h"

#include "sumprod/errors.hpp"
#include "sumprod/exponent_lattice.hpp"

#include <random>

using namespace sumprod;

TEST_CASE("factorize over a basis") {
    const PrimeBasis b({2, 3});
    CHECK(factorize(12, b) == ExponentVector{2, 1});
    CHECK(factorize(1, b) == ExponentVector{0, 0});
    CHECK_THROWS_AS(factorize(10, b), CofactorRemains);
    CHECK_THROWS_AS(factorize(0, b), Error);
}

TEST_CASE("basis must be distinct primes") {
    CHECK_THROWS_AS(PrimeBasis({2, 4}), InvalidArgument);
    CHECK_THROWS_AS(PrimeBasis({3, 3}), InvalidArgument);
}

TEST_CASE("embed_set picks the minimal basis") {
    std::vector<std::uint64_t> v{1, 2, 3, 6};
    auto e = embed_set(v);
    CHECK(e.basis.primes() == std::vector<std::uint64_t>{2, 3});
    CHECK(e.set.elements() == std::vector<ExponentVector>{{0, 0}, {0, 1}, {1, 0}, {1, 1}});

    std::vector<std::uint64_t> five{5};
    auto f = embed_set(five);
    CHECK(f.basis.primes() == std::vector<std::uint64_t>{5});
    CHECK(f.set.elements() == std::vector<ExponentVector>{{1}});

    std::vector<std::uint64_t> w{8, 12};
    auto g = embed_set(w);
    CHECK(g.set.size() == 2);
    CHECK(g.set.contains(ExponentVector{3, 0}));
    CHECK(g.set.contains(ExponentVector{2, 1}));

    std::vector<std::uint64_t> one{1};
    CHECK(embed_set(one).set.size() == 1);
}

TEST_CASE("evaluate") {
    const PrimeBasis b({2, 3});
    CHECK(evaluate(ExponentVector{2, 1}, b) == 12);
    CHECK(evaluate(ExponentVector{0, 0}, b) == 1);
    BigInt want = 1;
    for (int i = 0; i < 10; ++i) want *= 6;
    CHECK(evaluate(ExponentVector{10, 10}, b) == want);
    CHECK(want == BigInt(60466176));
}

TEST_CASE("round trip and homomorphism on random values") {
    std::mt19937_64 rng(11);
    const PrimeBasis b({2, 3, 5, 7});
    std::uniform_int_distribution<int> e(0, 6);
    for (int t = 0; t < 200; ++t) {
        ExponentVector u(4), v(4);
        for (auto& x : u) x = static_cast<Exponent>(e(rng));
        for (auto& x : v) x = static_cast<Exponent>(e(rng));
        const auto m = evaluate(u, b).convert_to<std::uint64_t>();
        const auto n = evaluate(v, b).convert_to<std::uint64_t>();
        CHECK(factorize(m, b) == u);
        if (m <= UINT64_MAX / n) {
            auto s = factorize(m * n, b);
            for (int i = 0; i < 4; ++i) CHECK(s[i] == u[i] + v[i]);
        }
    }
}

TEST_CASE("project and injectivity") {
    const PrimeBasis b({2, 3});
    ExpSet s(b, {{1, 0}, {0, 1}});
    std::vector<std::size_t> second{1};
    auto p = project(s, second);
    CHECK(p.size() == 2);
    std::vector<std::size_t> all{0, 1};
    CHECK(project(s, all) == s);

    ExpSet t(PrimeBasis({2, 3, 5}), {{0, 0, 1}, {0, 1, 0}});
    std::vector<std::size_t> first{0};
    CHECK(project(t, first).size() == 1);
    CHECK_FALSE(is_injective_on(t, first));
    CHECK(is_injective_on(t, second));
    std::vector<std::size_t> none;
    CHECK_THROWS_AS(project(t, none), EmptyIndexSet);
}

TEST_CASE("text form round trips") {
    std::mt19937_64 rng(3);
    std::uniform_int_distribution<int> e(0, 9);
    std::vector<ExponentVector> v;
    for (int i = 0; i < 40; ++i) v.push_back({static_cast<Exponent>(e(rng)), static_cast<Exponent>(e(rng)),
                                              static_cast<Exponent>(e(rng))});
    ExpSet s(PrimeBasis({2, 5, 11}), v);
    CHECK(from_text(to_text(s)) == s);
    CHECK_THROWS(from_text("basis 2 3\n1 2 3\n"));
}
