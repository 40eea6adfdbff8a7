#include "doctest.h"
#include "oracles.hpp"

#include "sumprod/bounds.hpp"
#include "sumprod/errors.hpp"

#include <cmath>
#include <random>
#include <sstream>

using namespace sumprod;

TEST_CASE("base pair") {
    auto p = base_pair(4, 2);
    CHECK(p.phi(100, 1, 1) == doctest::Approx(100));
    CHECK(p.phi(100, 0.5, 2) == doctest::Approx(100.0 / 16));
    // (K/delta)^C = 4: q^4 = 256 < sqrt(1e6)
    CHECK(p.psi(1e6, 0.5, 1) == doctest::Approx(256));
    CHECK(p.psi(1e6, 0.01, 50) == doctest::Approx(1000));
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> u(0, 1);
    for (int t = 0; t < 200; ++t) {
        const double n = std::exp(20 * u(rng)), d = 0.001 + u(rng), k = 1 + 100 * u(rng);
        CHECK(p.phi(n, std::min(d, 1.0), k) <= n * (1 + 1e-12));
    }
    CHECK(check_admissible(p).pass());
}

TEST_CASE("iterated pair") {
    auto p = lemma43_pair(0.1);
    const double e = std::exp(1.0);
    CHECK(p.phi(1e4, 1, e) == doctest::Approx(1e4));
    CHECK(p.phi(1e4, 1 / e, 1) == doctest::Approx(1e4));
    double prev = 0;
    for (double k : {1.0, 3.0, 10.0, 100.0, 1e4}) {
        const double v = p.log_psi(std::log(1e8), std::log(0.5), std::log(k));
        CHECK(v >= prev - 1e-12);
        prev = v;
    }
    // K = N^0.01, delta = 1/2, gamma = 0.1
    const double ln = std::log(1e30);
    const double lk = 0.01 * ln, ld = std::log(0.5);
    const double x = lk - ld;
    const double want = std::log(4.0) * std::pow(std::max(x, 1.0), 2 / 0.1) + 0.1 * ln;
    CHECK(p.log_psi(ln, ld, lk) == doctest::Approx(want));
    CHECK(std::isfinite(p.log_psi(ln, ld, lk)));
    CHECK(check_admissible(p).pass());

    auto s = lemma43_schedule(0.1, 0.5, 100);
    CHECK(s.t == doctest::Approx(std::pow(2.0, s.ell)));
    CHECK(s.t >= std::log(200.0));
    CHECK(s.t / 2 < std::max(std::log(200.0), 1.0));
    CHECK(s.log_A == doctest::Approx(std::log(s.t) / 0.1));
}

TEST_CASE("large-N pair") {
    auto p = lemma51_pair(0.1, 0.1, 1e6);
    for (const char* k : {"A1", "A2", "A3", "B1", "B2", "B3"}) REQUIRE(p.params.count(k));
    CHECK(p.params.at("A1") < p.params.at("A2"));
    CHECK(p.params.at("A2") < p.params.at("A3"));
    CHECK(p.params.at("B1") < p.params.at("B2"));
    CHECK(p.params.at("B2") < p.params.at("B3"));
    CHECK(p.params.at("A1") == doctest::Approx(2 * std::log(std::log(1e6))));
    CHECK(p.params.at("B1") == doctest::Approx(std::pow(std::log(1e6), 0.9)));
    // the v exponent 6 A1 - ln(20/11) A2 + 40 must be non-positive
    const double vexp = 6 * p.params.at("A1") - std::log(20.0 / 11.0) * p.params.at("A2") + 40;
    CHECK(vexp <= 0);
    CHECK(p.params.at("A2") >= 10 * p.params.at("A1") - 1e-9);

    const auto dom = sample_domain(p);
    for (double ln : {dom.log_n_min, 3 * dom.log_n_min, dom.log_n_max})
        for (double ld : {0.0, -1.0, -10.0}) {
            auto f = lemma51_factors(ln, ld, p.params);
            CHECK(f.u >= 0);
            CHECK(f.v >= -1e-12);
            CHECK(f.u_prime <= 0);
            CHECK(f.v_prime <= 1e-12);
            if (ld == 0.0) {
                CHECK(f.v == 0);
                CHECK(f.v_prime == 0);
            }
        }
    CHECK(check_admissible(p, dom).pass());
}

TEST_CASE("transform") {
    auto base = base_pair(4, 2);
    const double ln = std::log(1e6), ld = std::log(0.5), lk = std::log(4.0);
    auto t = transform_eval(base, ln, ld, lk, 8);
    CHECK(t.feasible > 0);
    CHECK(t.log_phi <= base.log_phi(ln, ld, lk) + 1e-9);
    REQUIRE(t.argmax.size() == 6);
    const double pmax = base.log_psi(t.argmax[0], t.argmax[2], t.argmax[4]) +
                        base.log_psi(t.argmax[1], t.argmax[3], t.argmax[5]);
    CHECK(t.log_psi == doctest::Approx(std::log(2 * 4.0) + pmax));
    REQUIRE(t.argmin.size() == 6);
    CHECK(t.argmin[0] + t.argmin[1] <= ln + 1e-9);

    auto fine = transform_eval(base, ln, ld, lk, 15);
    CHECK(fine.log_phi <= t.log_phi + 1e-12);
    CHECK(fine.log_psi >= t.log_psi - 1e-12);

    CHECK_THROWS_AS(transform_eval(base, ln, 0, 0, 8), EmptyFeasibleSet);
}

TEST_CASE("Lambda") {
    LambdaConstants k{2, 3, 1, 2};
    CHECK(compute_Lambda(0.5, 0.5, 4, k) == doctest::Approx(20));
    CHECK(compute_Lambda(1e-9, 0.5, 4, k) > 1e9);
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> u(0.01, 10);
    for (int t = 0; t < 200; ++t) {
        LambdaConstants c{u(rng), u(rng), u(rng), u(rng)};
        const double tau = u(rng) / 21, gamma = u(rng) / 21;
        const double L = compute_Lambda(tau, gamma, 4, c);
        CHECK(L == doctest::Approx(2 * c.A1 / tau + c.A2 + c.B1 + 2 * c.B2 / gamma));
        CHECK(lambda_consequences(L, tau, gamma, c).all());
    }
}

TEST_CASE("k of b") {
    auto one = compute_k_of_b(1, [](int) { return 0.5; });
    CHECK(one.log2_k == 50);
    REQUIRE(one.k);
    CHECK(*one.k == (std::uint64_t{1} << 50));
    auto big = compute_k_of_b(1, [](int) { return 3.0; });
    CHECK(big.log2_k == 300);
    CHECK_FALSE(big.k);

    auto r = compute_k_of_b(2, [](int) { return 1.0; }, 2);
    CHECK(r.remark_log2_k == doctest::Approx(16));
    REQUIRE(r.remark_k);
    CHECK(*r.remark_k == 65536);

    auto b1 = compute_k_of_b(1);
    CHECK(b1.q == 4);
    CHECK(b1.gamma == doctest::Approx(0.01));
    CHECK(b1.log2_k == std::ceil(100 * b1.Lambda));
    CHECK(b1.Lambda == doctest::Approx(lambda_of_b(1)));
    auto b2 = compute_k_of_b(2);
    CHECK(b2.log2_k >= b1.log2_k);
}

TEST_CASE("pigeonhole chain") {
    auto eq = pigeonhole_chain({10, 30, 90, 270}, 3);
    CHECK(eq.ell0 == 0);
    CHECK(eq.k0 == 1);
    CHECK(eq.ratio == doctest::Approx(3));

    auto flat = pigeonhole_chain({10, 100, 100, 1000}, 4);
    CHECK(flat.ell0 == 1);
    CHECK(flat.k0 == 2);
    CHECK(flat.ratio == doctest::Approx(1));

    CHECK_THROWS_AS(pigeonhole_chain({10}, 2), ChainTooShort);
    CHECK_THROWS_AS(pigeonhole_chain({10, 5}, 2), InvalidArgument);

    std::mt19937_64 rng(3);
    for (int t = 0; t < 100; ++t) {
        const Count N = 5 + rng() % 20;
        const int b = 2 + static_cast<int>(rng() % 3);
        const std::size_t ell = 1 + rng() % 6;
        std::vector<Count> s{N};
        for (std::size_t j = 0; j < ell; ++j) s.push_back(s.back() * (1 + rng() % 3) + rng() % 5);
        auto c = pigeonhole_chain(s, b);
        const double gm = std::pow(static_cast<double>(s.back()) / static_cast<double>(s.front()), 1.0 / ell);
        CHECK(c.geometric_mean == doctest::Approx(gm));
        CHECK(c.ratio <= gm * (1 + 1e-12));
        if (static_cast<double>(s.back()) < std::pow(static_cast<double>(N), b)) {
            CHECK(c.below_power);
            CHECK(c.ratio < std::pow(static_cast<double>(N), (b - 1.0) / ell));
        }
    }
}

TEST_CASE("driver") {
    std::vector<std::int64_t> gp;
    for (int i = 0; i < 8; ++i) gp.push_back(std::int64_t{1} << i);
    auto g = theorem_driver(IntSet(gp), 2, 3);
    CHECK(g.verdict == "sum horn");
    for (const auto& r : g.rows) {
        CHECK(r.product_size == r.k * 7 + 1);
        CHECK(r.sum_size == oracle::ksum(gp, static_cast<int>(r.k)).size());
    }

    std::vector<std::int64_t> ap{1, 2, 3, 4, 5, 6, 7, 8};
    auto a = theorem_driver(IntSet(ap), 2, 3);
    CHECK(a.verdict == "product horn");
    for (const auto& r : a.rows) {
        CHECK(r.sum_size == r.k * 7 + 1);
        CHECK(r.product_size == oracle::kprod(ap, static_cast<int>(r.k)).size());
    }
    REQUIRE(a.chain);
    CHECK(a.b_set_size == a.rows[a.chain->ell0].product_size);

    auto d = theorem_driver(IntSet{5}, 2);
    CHECK(d.verdict == "degenerate");
}

TEST_CASE("config") {
    std::istringstream ok("C = 3\nNbar = 1e8\ngrid = 8\n");
    auto c = parse_config(ok);
    CHECK(c.C == 3);
    CHECK(c.Nbar == 1e8);
    CHECK(c.grid == 8);
    CHECK(c.q == 4);
    std::istringstream unknown("bogus = 1\n");
    CHECK_THROWS_AS(parse_config(unknown), InvalidSpec);
    std::istringstream bad("C = abc\n");
    CHECK_THROWS_AS(parse_config(bad), InvalidSpec);
    CHECK(config_values(BoundsConfig{}).at("remark_C") == 2);
}
