#pragma once
// Brute-force reference computations. Nothing here calls the library's
// kernels; inputs and outputs are plain vectors.

#include <boost/multiprecision/cpp_int.hpp>

#include <cmath>
#include <complex>
#include <cstdint>
#include <map>
#include <numbers>
#include <random>
#include <set>
#include <vector>

namespace oracle {

using boost::multiprecision::cpp_int;
using Vec = std::vector<std::int64_t>;

inline std::set<std::int64_t> ksum(const Vec& a, int k) {
    std::set<std::int64_t> cur{0};
    for (int i = 0; i < k; ++i) {
        std::set<std::int64_t> next;
        for (auto x : cur)
            for (auto y : a) next.insert(x + y);
        cur = std::move(next);
    }
    return cur;
}

inline std::set<cpp_int> kprod(const Vec& a, int k) {
    std::set<cpp_int> cur{1};
    for (int i = 0; i < k; ++i) {
        std::set<cpp_int> next;
        for (const auto& x : cur)
            for (auto y : a) next.insert(x * y);
        cur = std::move(next);
    }
    return cur;
}

/// r_h(n) by enumerating all ordered h-tuples.
inline std::map<std::int64_t, std::uint64_t> reps(const Vec& a, int h) {
    std::map<std::int64_t, std::uint64_t> r;
    std::vector<std::size_t> idx(static_cast<std::size_t>(h), 0);
    if (a.empty()) return r;
    while (true) {
        std::int64_t s = 0;
        for (auto i : idx) s += a[i];
        ++r[s];
        std::size_t p = 0;
        while (p < idx.size() && ++idx[p] == a.size()) idx[p++] = 0;
        if (p == idx.size()) break;
    }
    return r;
}

inline cpp_int energy(const Vec& a, int h) {
    cpp_int e = 0;
    for (const auto& [n, c] : reps(a, h)) e += cpp_int(c) * c;
    return e;
}

/// Quadruple counter: #{(a,b,c,d) : a+b = c+d}.
inline std::uint64_t quadruples(const Vec& a) {
    std::uint64_t n = 0;
    for (auto x : a)
        for (auto y : a)
            for (auto z : a)
                for (auto w : a) n += (x + y == z + w);
    return n;
}

/// Rank of an integer matrix by fraction-free (Bareiss) elimination.
inline std::size_t bareiss_rank(std::vector<std::vector<cpp_int>> m) {
    if (m.empty()) return 0;
    const std::size_t rows = m.size(), cols = m[0].size();
    std::size_t r = 0;
    cpp_int prev = 1;
    for (std::size_t c = 0; c < cols && r < rows; ++c) {
        std::size_t p = r;
        while (p < rows && m[p][c] == 0) ++p;
        if (p == rows) continue;
        std::swap(m[p], m[r]);
        for (std::size_t i = r + 1; i < rows; ++i) {
            for (std::size_t j = c + 1; j < cols; ++j) m[i][j] = (m[r][c] * m[i][j] - m[i][c] * m[r][j]) / prev;
            m[i][c] = 0;
        }
        prev = m[r][c];
        ++r;
    }
    return r;
}

/// ||sum c_n e(n theta)||_q on M equispaced points, by direct summation.
inline double trig_norm(const Vec& a, const std::vector<std::complex<double>>& c, double q, std::size_t M) {
    double acc = 0;
    for (std::size_t j = 0; j < M; ++j) {
        std::complex<double> f = 0;
        const double th = static_cast<double>(j) / static_cast<double>(M);
        for (std::size_t i = 0; i < a.size(); ++i)
            f += c[i] * std::polar(1.0, 2 * std::numbers::pi * static_cast<double>(a[i]) * th);
        acc += std::pow(std::abs(f), q);
    }
    return std::pow(acc / static_cast<double>(M), 1 / q);
}

inline Vec random_set(std::mt19937_64& rng, std::size_t n, std::int64_t lo, std::int64_t hi) {
    std::uniform_int_distribution<std::int64_t> d(lo, hi);
    std::set<std::int64_t> s;
    while (s.size() < n) s.insert(d(rng));
    return Vec(s.begin(), s.end());
}

inline std::vector<std::vector<std::uint32_t>> random_vectors(std::mt19937_64& rng, std::size_t n, std::size_t dim,
                                                             std::uint32_t max_exp) {
    std::uniform_int_distribution<std::uint32_t> d(0, max_exp);
    std::set<std::vector<std::uint32_t>> s;
    double cap = std::pow(max_exp + 1.0, static_cast<double>(dim));
    if (static_cast<double>(n) > cap) n = static_cast<std::size_t>(cap);
    while (s.size() < n) {
        std::vector<std::uint32_t> v(dim);
        for (auto& x : v) x = d(rng);
        s.insert(v);
    }
    return {s.begin(), s.end()};
}

}  // namespace oracle
