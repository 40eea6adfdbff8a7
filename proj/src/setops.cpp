#include "sumprod/setops.hpp"

#include "ntt.hpp"
#include "sumprod/errors.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <optional>
#include <ostream>
#include <unordered_map>
#include <unordered_set>

namespace sumprod {

std::string to_string(Count c) {
    if (c == 0) return "0";
    std::string s;
    while (c > 0) {
        s.push_back(static_cast<char>('0' + static_cast<int>(c % 10)));
        c /= 10;
    }
    std::reverse(s.begin(), s.end());
    return s;
}

double to_double(Count c) {
    return static_cast<double>(static_cast<std::uint64_t>(c >> 64)) * 18446744073709551616.0 +
           static_cast<double>(static_cast<std::uint64_t>(c));
}

// ---------------------------------------------------------------- IntSet

IntSet::IntSet(std::initializer_list<std::int64_t> values) : IntSet(std::vector<std::int64_t>(values)) {}

IntSet::IntSet(std::vector<std::int64_t> values) : v_(std::move(values)) {
    std::sort(v_.begin(), v_.end());
    v_.erase(std::unique(v_.begin(), v_.end()), v_.end());
}

IntSet IntSet::from_sorted(std::vector<std::int64_t> values) {
    IntSet s;
    s.v_ = std::move(values);
    return s;
}

bool IntSet::contains(std::int64_t x) const { return std::binary_search(v_.begin(), v_.end(), x); }

std::vector<std::uint64_t> IntSet::positive_values() const {
    std::vector<std::uint64_t> out;
    out.reserve(v_.size());
    for (auto x : v_) {
        if (x < 1) throw NonPositiveElement(std::to_string(x) + " is not a positive integer");
        out.push_back(static_cast<std::uint64_t>(x));
    }
    return out;
}

// ---------------------------------------------------------------- sumsets

namespace {

constexpr std::size_t kDenseMaxBits = std::size_t{1} << 27;
constexpr std::size_t kSortMaxPairs = std::size_t{1} << 25;

void check_budget(std::size_t size, std::size_t budget) {
    if (size > budget)
        throw BudgetExceeded("set of size " + std::to_string(size) + " exceeds budget " +
                             std::to_string(budget));
}

// OR `src` shifted left by `shift` bits into `dst`.
void or_shifted(std::vector<std::uint64_t>& dst, const std::vector<std::uint64_t>& src, std::size_t shift) {
    const std::size_t ws = shift / 64, bs = shift % 64;
    for (std::size_t i = 0; i < src.size(); ++i) {
        const std::uint64_t w = src[i];
        if (!w) continue;
        if (i + ws < dst.size()) dst[i + ws] |= w << bs;
        if (bs && i + ws + 1 < dst.size()) dst[i + ws + 1] |= w >> (64 - bs);
    }
}

IntSet sumset_dense(const IntSet& x, const IntSet& y, std::int64_t lo, std::size_t range) {
    std::vector<std::uint64_t> xb((static_cast<std::size_t>(x.max() - x.min()) + 64) / 64, 0);
    for (auto v : x) {
        const auto off = static_cast<std::size_t>(v - x.min());
        xb[off / 64] |= std::uint64_t{1} << (off % 64);
    }
    std::vector<std::uint64_t> out((range + 63) / 64, 0);
    for (auto v : y) or_shifted(out, xb, static_cast<std::size_t>(v - y.min()));
    std::vector<std::int64_t> vals;
    for (std::size_t w = 0; w < out.size(); ++w) {
        std::uint64_t bits = out[w];
        while (bits) {
            const int b = std::countr_zero(bits);
            vals.push_back(lo + static_cast<std::int64_t>(w * 64 + static_cast<std::size_t>(b)));
            bits &= bits - 1;
        }
    }
    return IntSet::from_sorted(std::move(vals));
}

IntSet sumset_sparse(const IntSet& x, const IntSet& y, std::size_t budget) {
    const std::size_t pairs = x.size() * y.size();
    if (pairs <= kSortMaxPairs) {
        std::vector<std::int64_t> vals;
        vals.reserve(pairs);
        for (auto a : x)
            for (auto b : y) vals.push_back(a + b);
        return IntSet(std::move(vals));
    }
    std::unordered_set<std::int64_t> seen;
    seen.reserve(std::min(pairs, budget + 1));
    for (auto a : x) {
        for (auto b : y) {
            seen.insert(a + b);
            check_budget(seen.size(), budget);
        }
    }
    return IntSet(std::vector<std::int64_t>(seen.begin(), seen.end()));
}

// Mixed-radix packing of exponent vectors into int64, most significant
// coordinate first, so integer order is lexicographic order. Addition of
// codes matches vector addition as long as no coordinate passes its radix.
struct Packing {
    std::vector<std::int64_t> radix;
    std::vector<std::int64_t> weight;
    std::vector<std::int64_t> offset;  // subtracted before packing (signed sets)
    bool ok = false;

    explicit Packing(std::vector<std::int64_t> radices, std::vector<std::int64_t> offsets = {})
        : radix(std::move(radices)), weight(radix.size()), offset(std::move(offsets)) {
        if (offset.empty()) offset.assign(radix.size(), 0);
        __int128 w = 1;
        for (std::size_t i = radix.size(); i-- > 0;) {
            weight[i] = static_cast<std::int64_t>(w);
            w *= radix[i];
            if (w > (static_cast<__int128>(1) << 62)) return;
        }
        ok = true;
    }

    template <class Vec>
    std::int64_t encode(const Vec& v) const {
        std::int64_t c = 0;
        for (std::size_t i = 0; i < radix.size(); ++i)
            c += (static_cast<std::int64_t>(v[i]) + offset[i]) * weight[i];
        return c;
    }

    template <class T>
    void decode(std::int64_t c, T* out, std::int64_t shift = 0) const {
        for (std::size_t i = 0; i < radix.size(); ++i) {
            out[i] = static_cast<T>(c / weight[i] - shift * offset[i]);
            c %= weight[i];
        }
    }
};

std::vector<std::int64_t> coordinate_max(const ExpSet& s) {
    std::vector<std::int64_t> mx(s.dim(), 0);
    for (std::size_t k = 0; k < s.size(); ++k) {
        auto e = s[k];
        for (std::size_t i = 0; i < s.dim(); ++i) mx[i] = std::max<std::int64_t>(mx[i], e[i]);
    }
    return mx;
}

IntSet pack(const ExpSet& s, const Packing& p) {
    std::vector<std::int64_t> codes;
    codes.reserve(s.size());
    for (std::size_t k = 0; k < s.size(); ++k) codes.push_back(p.encode(s[k]));
    return IntSet::from_sorted(std::move(codes));  // lexicographic order is preserved
}

ExpSet unpack(const IntSet& codes, const Packing& p, const PrimeBasis& basis) {
    std::vector<Exponent> flat(codes.size() * basis.size());
    for (std::size_t k = 0; k < codes.size(); ++k) p.decode(codes[k], flat.data() + k * basis.size());
    return ExpSet::from_sorted_flat(basis, std::move(flat));
}

std::pair<ExpSet, ExpSet> common_basis(const ExpSet& x, const ExpSet& y) {
    if (x.basis() == y.basis()) return {x, y};
    auto b = x.basis().union_with(y.basis());
    return {x.reindex(b), y.reindex(b)};
}

ExpSet sumset_vectors(const ExpSet& x, const ExpSet& y, std::size_t budget) {
    std::vector<ExponentVector> out;
    out.reserve(x.size() * y.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        for (std::size_t j = 0; j < y.size(); ++j) {
            ExponentVector v(x.dim());
            for (std::size_t c = 0; c < x.dim(); ++c) v[c] = x[i][c] + y[j][c];
            out.push_back(std::move(v));
        }
    }
    ExpSet r(x.basis(), std::move(out));
    check_budget(r.size(), budget);
    return r;
}

}  // namespace

IntSet sumset(const IntSet& x, const IntSet& y, std::size_t budget) {
    if (x.empty() || y.empty()) return {};
    const __int128 lo = static_cast<__int128>(x.min()) + y.min();
    const __int128 hi = static_cast<__int128>(x.max()) + y.max();
    if (lo < INT64_MIN || hi > INT64_MAX) throw Overflow("sumset leaves the int64 range");
    const __int128 range = hi - lo + 1;
    IntSet out;
    // Dense shift-or costs |y| * range / 64 word operations.
    if (range <= static_cast<__int128>(kDenseMaxBits) &&
        range / 64 <= static_cast<__int128>(4 * x.size()) + 64)
        out = sumset_dense(x, y, static_cast<std::int64_t>(lo), static_cast<std::size_t>(range));
    else
        out = sumset_sparse(x, y, budget);
    check_budget(out.size(), budget);
    return out;
}

ExpSet sumset(const ExpSet& x0, const ExpSet& y0, std::size_t budget) {
    if (x0.empty() || y0.empty()) return ExpSet::from_sorted_flat(x0.empty() ? x0.basis() : y0.basis(), {});
    auto [x, y] = common_basis(x0, y0);
    auto mx = coordinate_max(x), my = coordinate_max(y);
    std::vector<std::int64_t> radix(x.dim());
    for (std::size_t i = 0; i < x.dim(); ++i) radix[i] = mx[i] + my[i] + 1;
    Packing p(radix);
    if (!p.ok) return sumset_vectors(x, y, budget);
    return unpack(sumset(pack(x, p), pack(y, p), budget), p, x.basis());
}

IntSet iterated_sumset(const IntSet& s, int k, std::size_t budget) {
    if (k < 1) throw InvalidArgument("k must be >= 1");
    IntSet out = s;
    for (int i = 1; i < k; ++i) out = sumset(out, s, budget);
    return out;
}

ExpSet iterated_sumset(const ExpSet& s, int k, std::size_t budget) {
    if (k < 1) throw InvalidArgument("k must be >= 1");
    if (s.empty()) return s;
    auto mx = coordinate_max(s);
    std::vector<std::int64_t> radix(s.dim());
    for (std::size_t i = 0; i < s.dim(); ++i) radix[i] = static_cast<std::int64_t>(k) * mx[i] + 1;
    Packing p(radix);
    if (p.ok) return unpack(iterated_sumset(pack(s, p), k, budget), p, s.basis());
    ExpSet out = s;
    for (int i = 1; i < k; ++i) out = sumset_vectors(out, s, budget);
    return out;
}

// ---------------------------------------------------------------- products

std::vector<BigInt> ProductSet::values() const {
    std::vector<BigInt> out;
    out.reserve(size());
    for (std::size_t i = 0; i < size(); ++i) out.push_back(evaluate(exponents[i], basis));
    std::sort(out.begin(), out.end());
    return out;
}

IntSet ProductSet::to_int_set() const {
    std::vector<std::int64_t> out;
    out.reserve(size());
    for (const auto& v : values()) {
        if (v > BigInt(INT64_MAX)) throw Overflow("product " + v.str() + " does not fit in int64");
        out.push_back(static_cast<std::int64_t>(v));
    }
    return IntSet::from_sorted(std::move(out));
}

ProductSet product_set(const IntSet& a, int k, std::size_t budget) {
    if (a.empty()) throw InvalidArgument("product_set needs a nonempty set");
    auto vals = a.positive_values();
    auto emb = embed_set(vals);
    return {emb.basis, iterated_sumset(emb.set, k, budget)};
}

// ---------------------------------------------------------------- graphs

IntSet graph_sumset(const IntSet& a1, const IntSet& a2, const BipartiteGraph& g) {
    if (g.n_left() != a1.size() || g.n_right() != a2.size())
        throw InvalidArgument("graph does not match the set sizes");
    std::vector<std::int64_t> out;
    out.reserve(g.edge_count());
    for (const auto& [l, r] : g.edges()) out.push_back(a1[l] + a2[r]);
    return IntSet(std::move(out));
}

ExpSet graph_sumset(const ExpSet& a1, const ExpSet& a2, const BipartiteGraph& g) {
    if (g.n_left() != a1.size() || g.n_right() != a2.size())
        throw InvalidArgument("graph does not match the set sizes");
    if (a1.basis() != a2.basis()) throw InvalidArgument("graph sumset needs a shared basis");
    std::vector<ExponentVector> out;
    out.reserve(g.edge_count());
    for (const auto& [l, r] : g.edges()) {
        ExponentVector v(a1.dim());
        for (std::size_t c = 0; c < a1.dim(); ++c) v[c] = a1[l][c] + a2[r][c];
        out.push_back(std::move(v));
    }
    return ExpSet(a1.basis(), std::move(out));
}

double doubling_constant(const IntSet& a1, const IntSet& a2, const BipartiteGraph& g) {
    if (a1.empty() || a2.empty()) throw InvalidArgument("doubling constant needs nonempty sets");
    return static_cast<double>(graph_sumset(a1, a2, g).size()) /
           std::sqrt(static_cast<double>(a1.size()) * static_cast<double>(a2.size()));
}

double doubling_constant(const ExpSet& a1, const ExpSet& a2, const BipartiteGraph& g) {
    if (a1.empty() || a2.empty()) throw InvalidArgument("doubling constant needs nonempty sets");
    return static_cast<double>(graph_sumset(a1, a2, g).size()) /
           std::sqrt(static_cast<double>(a1.size()) * static_cast<double>(a2.size()));
}

// ---------------------------------------------------------------- r_h, energy

Count RepresentationCounts::at(std::int64_t n) const {
    auto it = std::lower_bound(support.begin(), support.end(), n);
    if (it == support.end() || *it != n) return 0;
    return counts[static_cast<std::size_t>(it - support.begin())];
}

Count RepresentationCounts::total() const {
    Count t = 0;
    for (auto c : counts) t += c;
    return t;
}

namespace {

RepresentationCounts counts_hash(const IntSet& a, int h) {
    std::unordered_map<std::int64_t, Count> cur;
    for (auto x : a) cur[x] = 1;
    for (int step = 1; step < h; ++step) {
        std::unordered_map<std::int64_t, Count> next;
        next.reserve(cur.size() * 2);
        for (const auto& [n, c] : cur)
            for (auto x : a) next[n + x] += c;
        cur = std::move(next);
    }
    std::vector<std::pair<std::int64_t, Count>> items(cur.begin(), cur.end());
    std::sort(items.begin(), items.end(), [](const auto& p, const auto& q) { return p.first < q.first; });
    RepresentationCounts rc;
    rc.engine_used = CountEngine::Hash;
    rc.support.reserve(items.size());
    rc.counts.reserve(items.size());
    for (const auto& [n, c] : items) {
        rc.support.push_back(n);
        rc.counts.push_back(c);
    }
    return rc;
}

struct Normalized {
    std::int64_t min = 0;
    std::int64_t step = 1;
    std::vector<std::uint32_t> offsets;
    std::uint64_t max_offset = 0;
};

// Affine normalization x -> (x - min) / gcd; r_h is invariant under it.
std::optional<Normalized> normalize(const IntSet& a) {
    Normalized n;
    n.min = a.min();
    std::uint64_t g = 0;
    for (auto x : a) g = std::gcd(g, static_cast<std::uint64_t>(x - n.min));
    n.step = g == 0 ? 1 : static_cast<std::int64_t>(g);
    n.max_offset = static_cast<std::uint64_t>(a.max() - n.min) / static_cast<std::uint64_t>(n.step);
    if (n.max_offset > UINT32_MAX) return std::nullopt;
    for (auto x : a) n.offsets.push_back(static_cast<std::uint32_t>((x - n.min) / n.step));
    return n;
}

bool convolution_feasible(const IntSet& a, int h, const Normalized& n) {
    const double len = static_cast<double>(h) * static_cast<double>(n.max_offset) + 1.0;
    return len <= static_cast<double>(detail::kMaxNttLength) &&
           h * std::log2(static_cast<double>(a.size())) < detail::kNttCoefficientBits;
}

RepresentationCounts counts_convolution(const IntSet&, int h, const Normalized& n) {
    auto coeffs = detail::indicator_power(n.offsets, static_cast<std::uint32_t>(n.max_offset), h);
    RepresentationCounts rc;
    rc.engine_used = CountEngine::Convolution;
    for (std::size_t i = 0; i < coeffs.size(); ++i) {
        if (coeffs[i] == 0) continue;
        rc.support.push_back(static_cast<std::int64_t>(h) * n.min + static_cast<std::int64_t>(i) * n.step);
        rc.counts.push_back(coeffs[i]);
    }
    return rc;
}

}  // namespace

RepresentationCounts representation_counts(const IntSet& a, int h, CountEngine engine) {
    if (h < 1) throw InvalidArgument("h must be >= 1");
    if (a.empty()) return {};
    if (h * std::log2(static_cast<double>(a.size())) >= 127.0)
        throw Overflow("N^h does not fit in 128-bit counts");
    const double hmax = static_cast<double>(h) * std::max(std::abs(static_cast<double>(a.min())),
                                                          std::abs(static_cast<double>(a.max())));
    if (hmax >= 9.2e18) throw Overflow("h-fold sums leave the int64 range");

    if (engine == CountEngine::Hash || h == 1) return counts_hash(a, h);

    auto norm = normalize(a);
    const bool feasible = norm && convolution_feasible(a, h, *norm);
    if (engine == CountEngine::Convolution) {
        if (!feasible) throw InvalidArgument("range too wide for the convolution engine");
        return counts_convolution(a, h, *norm);
    }
    if (!feasible) return counts_hash(a, h);

    // Predicted work: transforms versus support-times-N accumulation.
    const double len = std::bit_ceil(static_cast<std::uint64_t>(h) * norm->max_offset + 1);
    const double conv_cost = 6.0 * len * std::log2(std::max(2.0, len));
    const double n = static_cast<double>(a.size());
    double hash_cost = 0, support = n;
    for (int step = 1; step < h; ++step) {
        hash_cost += support * n;
        support = std::min(support * n, static_cast<double>(step + 1) * static_cast<double>(norm->max_offset) + 1);
    }
    hash_cost *= 4.0;  // hashing overhead per accumulation
    return conv_cost < hash_cost ? counts_convolution(a, h, *norm) : counts_hash(a, h);
}

void write_counts_csv(std::ostream& os, const RepresentationCounts& rc) {
    os << "n,count\n";
    for (std::size_t i = 0; i < rc.support.size(); ++i) os << rc.support[i] << ',' << to_string(rc.counts[i]) << '\n';
}

Count additive_energy(const IntSet& a, int h, CountEngine engine) {
    if (a.empty()) return 0;
    if ((2 * h - 1) * std::log2(static_cast<double>(a.size())) >= 127.0)
        throw Overflow("energy does not fit in 128-bit counts");
    auto rc = representation_counts(a, h, engine);
    Count e = 0;
    for (auto c : rc.counts) e += c * c;
    return e;
}

EnergyBound energy_sumset_bound(const IntSet& a, int h) {
    if (a.empty()) throw InvalidArgument("energy bound needs a nonempty set");
    auto rc = representation_counts(a, h);
    EnergyBound b;
    for (auto c : rc.counts) b.energy += c * c;
    b.sumset_size = rc.support.size();
    const BigInt n_pow = boost::multiprecision::pow(BigInt(a.size()), static_cast<unsigned>(2 * h));
    const BigInt energy(to_string(b.energy));
    b.lower_bound = static_cast<double>(n_pow) / static_cast<double>(energy);
    b.holds = BigInt(b.sumset_size) * energy >= n_pow;
    return b;
}

// ---------------------------------------------------------------- differences

IntSet difference_set(const IntSet& s) {
    std::vector<std::int64_t> out;
    out.reserve(s.size() * s.size());
    for (auto a : s)
        for (auto b : s) out.push_back(a - b);
    return IntSet(std::move(out));
}

SignedLatticeSet difference_set(const ExpSet& s) {
    SignedLatticeSet out;
    out.basis = s.basis();
    if (s.empty()) return out;
    const auto mx = coordinate_max(s);
    std::vector<std::int64_t> radix(s.dim()), offset(mx);
    for (std::size_t i = 0; i < s.dim(); ++i) radix[i] = 2 * mx[i] + 1;
    Packing p(radix, offset);
    if (p.ok) {
        // code(x - y + offset) = code(x) - code(y) + code(offset), all in range.
        Packing plain(radix);
        std::vector<std::int64_t> cx(s.size());
        for (std::size_t k = 0; k < s.size(); ++k) cx[k] = plain.encode(s[k]);
        const std::int64_t base = plain.encode(offset);
        std::vector<std::int64_t> codes;
        codes.reserve(s.size() * s.size());
        for (auto a : cx)
            for (auto b : cx) codes.push_back(a - b + base);
        IntSet uniq(std::move(codes));
        out.elements.reserve(uniq.size());
        for (auto c : uniq) {
            std::vector<std::int64_t> v(s.dim());
            plain.decode(c, v.data());
            for (std::size_t i = 0; i < s.dim(); ++i) v[i] -= offset[i];
            out.elements.push_back(std::move(v));
        }
        return out;
    }
    for (std::size_t i = 0; i < s.size(); ++i) {
        for (std::size_t j = 0; j < s.size(); ++j) {
            std::vector<std::int64_t> v(s.dim());
            for (std::size_t c = 0; c < s.dim(); ++c)
                v[c] = static_cast<std::int64_t>(s[i][c]) - static_cast<std::int64_t>(s[j][c]);
            out.elements.push_back(std::move(v));
        }
    }
    std::sort(out.elements.begin(), out.elements.end());
    out.elements.erase(std::unique(out.elements.begin(), out.elements.end()), out.elements.end());
    return out;
}

SignedLatticeSet quotient_set(const IntSet& a) {
    if (a.empty()) throw InvalidArgument("quotient_set needs a nonempty set");
    return difference_set(embed_set(a.positive_values()).set);
}

RuzsaReport ruzsa_audit(const IntSet& a) {
    if (a.empty()) throw InvalidArgument("ruzsa_audit needs a nonempty set");
    auto emb = embed_set(a.positive_values());
    RuzsaReport r;
    r.n = emb.set.size();
    r.difference_size = difference_set(emb.set).size();
    r.sumset_size = sumset(emb.set, emb.set).size();
    r.doubling = static_cast<double>(r.sumset_size) / static_cast<double>(r.n);
    r.bound = r.doubling * r.doubling * static_cast<double>(r.n);
    // |A-A| <= (|2A|/N)^2 N  <=>  |A-A| N <= |2A|^2
    r.holds = static_cast<Count>(r.difference_size) * r.n <= static_cast<Count>(r.sumset_size) * r.sumset_size;
    return r;
}

void write_growth_csv(std::ostream& os, std::span<const GrowthRow> rows) {
    os << "k,sumset_size,productset_size\n";
    for (const auto& r : rows) os << r.k << ',' << r.sumset_size << ',' << r.productset_size << '\n';
}

}  // namespace sumprod
